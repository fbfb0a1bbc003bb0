#include "soup/lexer.hpp"

#include <cctype>
#include <map>

#include "soup/diag.hpp"

namespace soup {

const char* tok_name(Tok t) {
    switch (t) {
        case Tok::End: return "end of input";
        case Tok::Ident: return "identifier";
        case Tok::Int: return "integer literal";
        case Tok::KwVoid: return "'void'";
        case Tok::KwU8: return "'u8'";
        case Tok::KwU32: return "'u32'";
        case Tok::KwI32: return "'i32'";
        case Tok::KwSize: return "'size_t'";
        case Tok::KwIf: return "'if'";
        case Tok::KwElse: return "'else'";
        case Tok::KwFor: return "'for'";
        case Tok::KwWhile: return "'while'";
        case Tok::KwReturn: return "'return'";
        case Tok::KwConfig: return "'config'";
        case Tok::KwIn: return "'in'";
        case Tok::KwNull: return "'NULL'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::LBrace: return "'{'";
        case Tok::RBrace: return "'}'";
        case Tok::LBracket: return "'['";
        case Tok::RBracket: return "']'";
        case Tok::Comma: return "','";
        case Tok::Semi: return "';'";
        case Tok::Assign: return "'='";
        case Tok::Plus: return "'+'";
        case Tok::Minus: return "'-'";
        case Tok::Star: return "'*'";
        case Tok::Slash: return "'/'";
        case Tok::Percent: return "'%'";
        case Tok::Shl: return "'<<'";
        case Tok::Shr: return "'>>'";
        case Tok::Lt: return "'<'";
        case Tok::Le: return "'<='";
        case Tok::Gt: return "'>'";
        case Tok::Ge: return "'>='";
        case Tok::EqEq: return "'=='";
        case Tok::Ne: return "'!='";
        case Tok::Not: return "'!'";
        case Tok::AndAnd: return "'&&'";
        case Tok::OrOr: return "'||'";
    }
    return "?";
}

static const std::map<std::string, Tok> kKeywords = {
    {"void", Tok::KwVoid},   {"u8", Tok::KwU8},       {"u32", Tok::KwU32},
    {"i32", Tok::KwI32},     {"size_t", Tok::KwSize}, {"if", Tok::KwIf},
    {"else", Tok::KwElse},   {"for", Tok::KwFor},     {"while", Tok::KwWhile},
    {"return", Tok::KwReturn}, {"config", Tok::KwConfig}, {"in", Tok::KwIn},
    {"NULL", Tok::KwNull},
};

std::vector<Token> lex(const std::string& src, const std::string& file) {
    std::vector<Token> out;
    size_t i = 0;
    int line = 1, col = 1;
    auto advance = [&](size_t n) {
        for (size_t k = 0; k < n; ++k) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while (i < src.size()) {
        char c = src[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            advance(1);
            continue;
        }
        if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        Token t;
        t.line = line;
        t.col = col;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i;
            while (j < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
                ++j;
            t.text = src.substr(i, j - i);
            auto kw = kKeywords.find(t.text);
            t.kind = kw == kKeywords.end() ? Tok::Ident : kw->second;
            advance(j - i);
            out.push_back(t);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            t.text = src.substr(i, j - i);
            try {
                t.ival = std::stoll(t.text);
            } catch (const std::out_of_range&) {
                throw SyntaxError(file, line, col, "integer literal out of range: " + t.text);
            }
            t.kind = Tok::Int;
            advance(j - i);
            out.push_back(t);
            continue;
        }
        auto two = [&](char c2, Tok k2, Tok k1) {
            if (i + 1 < src.size() && src[i + 1] == c2) {
                t.kind = k2;
                advance(2);
            } else {
                t.kind = k1;
                advance(1);
            }
        };
        switch (c) {
            case '(': t.kind = Tok::LParen; advance(1); break;
            case ')': t.kind = Tok::RParen; advance(1); break;
            case '{': t.kind = Tok::LBrace; advance(1); break;
            case '}': t.kind = Tok::RBrace; advance(1); break;
            case '[': t.kind = Tok::LBracket; advance(1); break;
            case ']': t.kind = Tok::RBracket; advance(1); break;
            case ',': t.kind = Tok::Comma; advance(1); break;
            case ';': t.kind = Tok::Semi; advance(1); break;
            case '+': t.kind = Tok::Plus; advance(1); break;
            case '-': t.kind = Tok::Minus; advance(1); break;
            case '*': t.kind = Tok::Star; advance(1); break;
            case '/': t.kind = Tok::Slash; advance(1); break;
            case '%': t.kind = Tok::Percent; advance(1); break;
            case '=': two('=', Tok::EqEq, Tok::Assign); break;
            case '!': two('=', Tok::Ne, Tok::Not); break;
            case '<':
                if (i + 1 < src.size() && src[i + 1] == '<') {
                    t.kind = Tok::Shl;
                    advance(2);
                } else {
                    two('=', Tok::Le, Tok::Lt);
                }
                break;
            case '>':
                if (i + 1 < src.size() && src[i + 1] == '>') {
                    t.kind = Tok::Shr;
                    advance(2);
                } else {
                    two('=', Tok::Ge, Tok::Gt);
                }
                break;
            case '&':
                if (i + 1 < src.size() && src[i + 1] == '&') {
                    t.kind = Tok::AndAnd;
                    advance(2);
                    break;
                }
                throw SyntaxError(file, line, col, "unexpected character '&'");
            case '|':
                if (i + 1 < src.size() && src[i + 1] == '|') {
                    t.kind = Tok::OrOr;
                    advance(2);
                    break;
                }
                throw SyntaxError(file, line, col, "unexpected character '|'");
            default:
                throw SyntaxError(file, line, col,
                                  std::string("unexpected character '") + c + "'");
        }
        out.push_back(t);
    }
    Token end;
    end.kind = Tok::End;
    end.line = line;
    end.col = col;
    out.push_back(end);
    return out;
}

} // namespace soup
