#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace soup {

enum class Tok {
    End,
    Ident,
    Int,
    KwVoid, KwU8, KwU32, KwI32, KwSize,
    KwIf, KwElse, KwFor, KwWhile, KwReturn, KwConfig, KwIn, KwNull,
    LParen, RParen, LBrace, RBrace, LBracket, RBracket,
    Comma, Semi, Assign,
    Plus, Minus, Star, Slash, Percent,
    Shl, Shr, Lt, Le, Gt, Ge, EqEq, Ne, Not, AndAnd, OrOr,
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int64_t ival = 0;
    int line = 1;
    int col = 1;
};

// Tokenizes a whole buffer.  `//` comments run to end of line.
std::vector<Token> lex(const std::string& src, const std::string& file);

const char* tok_name(Tok t);

} // namespace soup
