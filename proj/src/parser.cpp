#include "soup/parser.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "soup/diag.hpp"
#include "soup/lexer.hpp"

namespace soup {

namespace {

class Parser {
public:
    Parser(ProjectIndex& index, std::vector<Token> toks, std::string file)
        : index_(index), toks_(std::move(toks)), file_(std::move(file)) {}

    void parse_unit() {
        while (peek().kind != Tok::End) {
            if (peek().kind == Tok::KwConfig) {
                parse_config();
                continue;
            }
            parse_type_decl_or_function();
        }
    }

    std::shared_ptr<FunctionDef> parse_single_function() {
        auto fn = parse_function_after_header();
        expect(Tok::End);
        return fn;
    }

private:
    ProjectIndex& index_;
    std::vector<Token> toks_;
    std::string file_;
    size_t pos_ = 0;
    FunctionDef* cur_fn_ = nullptr;
    int loop_counter_ = 0;

    const Token& peek(int k = 0) const {
        size_t p = pos_ + static_cast<size_t>(k);
        return p < toks_.size() ? toks_[p] : toks_.back();
    }
    const Token& take() {
        const Token& t = toks_[pos_];
        if (pos_ + 1 < toks_.size()) ++pos_;
        return t;
    }
    [[noreturn]] void fail(const Token& t, const std::string& msg) const {
        throw SyntaxError(file_, t.line, t.col, msg);
    }
    const Token& expect(Tok k) {
        if (peek().kind != k)
            fail(peek(), std::string("expected ") + tok_name(k) + ", got " +
                             tok_name(peek().kind) +
                             (peek().text.empty() ? "" : " '" + peek().text + "'"));
        return take();
    }
    bool accept(Tok k) {
        if (peek().kind != k) return false;
        take();
        return true;
    }

    int fresh_site() { return index_.next_site++; }

    ExprPtr mk(ExprKind k, const Token& at) {
        auto e = std::make_shared<Expr>();
        e->kind = k;
        e->line = at.line;
        e->col = at.col;
        e->site = fresh_site();
        return e;
    }
    StmtPtr mks(StmtKind k, const Token& at) {
        auto s = std::make_shared<Stmt>();
        s->kind = k;
        s->line = at.line;
        s->site = fresh_site();
        return s;
    }

    static bool is_type_tok(Tok k) {
        return k == Tok::KwVoid || k == Tok::KwU8 || k == Tok::KwU32 || k == Tok::KwI32 ||
               k == Tok::KwSize;
    }

    TypeRef parse_type() {
        TypeRef t;
        switch (peek().kind) {
            case Tok::KwVoid: t.base = Base::Void; break;
            case Tok::KwU8: t.base = Base::U8; break;
            case Tok::KwU32: t.base = Base::U32; break;
            case Tok::KwI32: t.base = Base::I32; break;
            case Tok::KwSize: t.base = Base::Size; break;
            default: fail(peek(), "expected a type");
        }
        take();
        if (accept(Tok::Star)) t.ptr = true;
        return t;
    }

    void parse_config() {
        const Token& kw = expect(Tok::KwConfig);
        ConfigDecl c;
        c.file = file_;
        c.line = kw.line;
        c.name = expect(Tok::Ident).text;
        if (accept(Tok::KwIn)) {
            expect(Tok::LBrace);
            std::vector<int64_t> cands;
            cands.push_back(parse_const_int());
            while (accept(Tok::Comma)) cands.push_back(parse_const_int());
            expect(Tok::RBrace);
            c.candidates = std::move(cands);
        }
        expect(Tok::Assign);
        c.value = parse_const_int();
        expect(Tok::Semi);
        if (c.candidates &&
            std::find(c.candidates->begin(), c.candidates->end(), c.value) ==
                c.candidates->end())
            fail(kw, "config default not among declared candidates: " + c.name);
        if (index_.configs.count(c.name))
            fail(kw, "duplicate config declaration: " + c.name);
        index_.configs[c.name] = std::move(c);
    }

    int64_t parse_const_int() {
        bool neg = accept(Tok::Minus);
        const Token& t = expect(Tok::Int);
        return neg ? -t.ival : t.ival;
    }

    void parse_type_decl_or_function() {
        const Token& at = peek();
        TypeRef ty = parse_type();
        const Token& name = expect(Tok::Ident);
        if (peek().kind == Tok::LParen) {
            parse_function_body(ty, name);
            return;
        }
        // Global variable.
        GlobalVar g;
        g.file = file_;
        g.line = at.line;
        g.decl.name = name.text;
        g.decl.type = ty;
        if (accept(Tok::LBracket)) {
            if (ty.ptr) fail(at, "array of pointers is not supported");
            g.decl.array_len = static_cast<int>(expect(Tok::Int).ival);
            expect(Tok::RBracket);
            if (g.decl.array_len <= 0) fail(at, "array length must be positive");
        }
        if (accept(Tok::Assign)) {
            if (g.decl.array_len >= 0) fail(at, "array initializers are not supported");
            auto e = mk(ExprKind::IntLit, at);
            e->ival = parse_const_int();
            g.decl.init = e;
        }
        expect(Tok::Semi);
        if (ty.is_void()) fail(at, "variable cannot have type void");
        index_.globals.push_back(std::move(g));
    }

    void parse_function_body(TypeRef ret, const Token& name) {
        auto fn = std::make_shared<FunctionDef>();
        fn->name = name.text;
        fn->file = file_;
        fn->line = name.line;
        fn->ret = ret;
        cur_fn_ = fn.get();
        loop_counter_ = 0;
        expect(Tok::LParen);
        if (!accept(Tok::RParen)) {
            do {
                Param p;
                p.type = parse_type();
                if (p.type.is_void()) fail(peek(), "parameter cannot have type void");
                p.name = expect(Tok::Ident).text;
                fn->params.push_back(std::move(p));
            } while (accept(Tok::Comma));
            expect(Tok::RParen);
        }
        fn->body = parse_block();
        finish_function(*fn);
        index_.functions.push_back(fn);
        index_.by_name[fn->name].push_back(fn);
        auto unit = std::find_if(index_.files.begin(), index_.files.end(),
                                 [&](const SourceUnit& u) { return u.path == file_; });
        if (unit != index_.files.end()) unit->function_names.push_back(fn->name);
        cur_fn_ = nullptr;
    }

    std::shared_ptr<FunctionDef> parse_function_after_header() {
        TypeRef ty = parse_type();
        const Token& name = expect(Tok::Ident);
        auto fn = std::make_shared<FunctionDef>();
        fn->name = name.text;
        fn->file = file_;
        fn->line = name.line;
        fn->ret = ty;
        cur_fn_ = fn.get();
        loop_counter_ = 0;
        expect(Tok::LParen);
        if (!accept(Tok::RParen)) {
            do {
                Param p;
                p.type = parse_type();
                p.name = expect(Tok::Ident).text;
                fn->params.push_back(std::move(p));
            } while (accept(Tok::Comma));
            expect(Tok::RParen);
        }
        fn->body = parse_block();
        finish_function(*fn);
        cur_fn_ = nullptr;
        return fn;
    }

    std::vector<StmtPtr> parse_block() {
        expect(Tok::LBrace);
        std::vector<StmtPtr> out;
        while (!accept(Tok::RBrace)) out.push_back(parse_stmt());
        return out;
    }

    StmtPtr parse_stmt() {
        const Token& at = peek();
        if (is_type_tok(at.kind)) return parse_decl_stmt();
        switch (at.kind) {
            case Tok::KwIf: return parse_if();
            case Tok::KwWhile: return parse_while();
            case Tok::KwFor: return parse_for();
            case Tok::KwReturn: {
                take();
                auto s = mks(StmtKind::Return, at);
                if (!accept(Tok::Semi)) {
                    s->cond = parse_expr();
                    expect(Tok::Semi);
                }
                return s;
            }
            default: break;
        }
        if (at.kind == Tok::Ident) {
            const std::string& n = at.text;
            if (n == "assume" || n == "assert") {
                take();
                auto s = mks(n == "assume" ? StmtKind::Assume : StmtKind::Assert, at);
                expect(Tok::LParen);
                s->cond = parse_expr();
                expect(Tok::RParen);
                expect(Tok::Semi);
                return s;
            }
            if (n == "free") {
                take();
                auto s = mks(StmtKind::Free, at);
                expect(Tok::LParen);
                s->cond = parse_expr();
                expect(Tok::RParen);
                expect(Tok::Semi);
                return s;
            }
            if (n == "memcpy" || n == "memset") {
                take();
                auto s = mks(n == "memcpy" ? StmtKind::Memcpy : StmtKind::Memset, at);
                expect(Tok::LParen);
                s->lhs = parse_expr();
                expect(Tok::Comma);
                s->rhs = parse_expr();
                expect(Tok::Comma);
                s->n = parse_expr();
                expect(Tok::RParen);
                expect(Tok::Semi);
                return s;
            }
        }
        // Assignment or call statement.
        ExprPtr e = parse_expr();
        if (accept(Tok::Assign)) {
            if (!is_lvalue(*e)) fail(at, "left side of '=' is not assignable");
            auto s = mks(StmtKind::Assign, at);
            s->lhs = e;
            s->rhs = parse_expr();
            expect(Tok::Semi);
            return s;
        }
        if (e->kind != ExprKind::Call)
            fail(at, "expression statement must be a call");
        expect(Tok::Semi);
        auto s = mks(StmtKind::CallStmt, at);
        s->call = e;
        return s;
    }

    static bool is_lvalue(const Expr& e) {
        return e.kind == ExprKind::Ident || e.kind == ExprKind::Index ||
               (e.kind == ExprKind::Unary && e.un == UnOp::Deref);
    }

    StmtPtr parse_decl_stmt() {
        const Token& at = peek();
        auto s = mks(StmtKind::Decl, at);
        s->decl.type = parse_type();
        if (s->decl.type.is_void()) fail(at, "variable cannot have type void");
        s->decl.name = expect(Tok::Ident).text;
        if (accept(Tok::LBracket)) {
            if (s->decl.type.ptr) fail(at, "array of pointers is not supported");
            s->decl.array_len = static_cast<int>(expect(Tok::Int).ival);
            expect(Tok::RBracket);
            if (s->decl.array_len <= 0) fail(at, "array length must be positive");
        }
        if (accept(Tok::Assign)) {
            if (s->decl.array_len >= 0) fail(at, "array initializers are not supported");
            s->decl.init = parse_expr();
        }
        expect(Tok::Semi);
        return s;
    }

    StmtPtr parse_if() {
        const Token& at = expect(Tok::KwIf);
        auto s = mks(StmtKind::If, at);
        expect(Tok::LParen);
        s->cond = parse_expr();
        expect(Tok::RParen);
        s->body = parse_block();
        if (accept(Tok::KwElse)) {
            if (peek().kind == Tok::KwIf) {
                s->els.push_back(parse_if());
            } else {
                s->els = parse_block();
            }
        }
        return s;
    }

    std::string next_loop_id() {
        return cur_fn_->name + "." + std::to_string(loop_counter_++);
    }

    StmtPtr parse_while() {
        const Token& at = expect(Tok::KwWhile);
        auto s = mks(StmtKind::While, at);
        s->loop_id = next_loop_id();
        expect(Tok::LParen);
        s->cond = parse_expr();
        expect(Tok::RParen);
        s->body = parse_block();
        return s;
    }

    StmtPtr parse_for() {
        const Token& at = expect(Tok::KwFor);
        auto s = mks(StmtKind::For, at);
        s->loop_id = next_loop_id();
        expect(Tok::LParen);
        if (!accept(Tok::Semi)) {
            if (is_type_tok(peek().kind)) {
                s->init_stmt = parse_decl_stmt(); // consumes ';'
            } else {
                const Token& it = peek();
                ExprPtr lv = parse_expr();
                if (!is_lvalue(*lv)) fail(it, "for-init must be an assignment");
                expect(Tok::Assign);
                auto a = mks(StmtKind::Assign, it);
                a->lhs = lv;
                a->rhs = parse_expr();
                s->init_stmt = a;
                expect(Tok::Semi);
            }
        }
        s->cond = parse_expr();
        expect(Tok::Semi);
        if (peek().kind != Tok::RParen) {
            const Token& st = peek();
            ExprPtr lv = parse_expr();
            if (!is_lvalue(*lv)) fail(st, "for-step must be an assignment");
            expect(Tok::Assign);
            auto a = mks(StmtKind::Assign, st);
            a->lhs = lv;
            a->rhs = parse_expr();
            s->step_stmt = a;
        }
        expect(Tok::RParen);
        s->body = parse_block();
        return s;
    }

    // Precedence climbing.
    ExprPtr parse_expr() { return parse_or(); }

    ExprPtr parse_or() {
        ExprPtr l = parse_and();
        while (peek().kind == Tok::OrOr) {
            const Token& op = take();
            auto e = mk(ExprKind::Binary, op);
            e->bin = BinOp::LOr;
            e->a = l;
            e->b = parse_and();
            l = e;
        }
        return l;
    }
    ExprPtr parse_and() {
        ExprPtr l = parse_eq();
        while (peek().kind == Tok::AndAnd) {
            const Token& op = take();
            auto e = mk(ExprKind::Binary, op);
            e->bin = BinOp::LAnd;
            e->a = l;
            e->b = parse_eq();
            l = e;
        }
        return l;
    }
    ExprPtr parse_eq() {
        ExprPtr l = parse_rel();
        while (peek().kind == Tok::EqEq || peek().kind == Tok::Ne) {
            const Token& op = take();
            auto e = mk(ExprKind::Binary, op);
            e->bin = op.kind == Tok::EqEq ? BinOp::Eq : BinOp::Ne;
            e->a = l;
            e->b = parse_rel();
            l = e;
        }
        return l;
    }
    ExprPtr parse_rel() {
        ExprPtr l = parse_shift();
        while (true) {
            BinOp b;
            switch (peek().kind) {
                case Tok::Lt: b = BinOp::Lt; break;
                case Tok::Le: b = BinOp::Le; break;
                case Tok::Gt: b = BinOp::Gt; break;
                case Tok::Ge: b = BinOp::Ge; break;
                default: return l;
            }
            const Token& op = take();
            auto e = mk(ExprKind::Binary, op);
            e->bin = b;
            e->a = l;
            e->b = parse_shift();
            l = e;
        }
    }
    ExprPtr parse_shift() {
        ExprPtr l = parse_add();
        while (peek().kind == Tok::Shl || peek().kind == Tok::Shr) {
            const Token& op = take();
            auto e = mk(ExprKind::Binary, op);
            e->bin = op.kind == Tok::Shl ? BinOp::Shl : BinOp::Shr;
            e->a = l;
            e->b = parse_add();
            l = e;
        }
        return l;
    }
    ExprPtr parse_add() {
        ExprPtr l = parse_mul();
        while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
            const Token& op = take();
            auto e = mk(ExprKind::Binary, op);
            e->bin = op.kind == Tok::Plus ? BinOp::Add : BinOp::Sub;
            e->a = l;
            e->b = parse_mul();
            l = e;
        }
        return l;
    }
    ExprPtr parse_mul() {
        ExprPtr l = parse_unary();
        while (peek().kind == Tok::Star || peek().kind == Tok::Slash ||
               peek().kind == Tok::Percent) {
            const Token& op = take();
            auto e = mk(ExprKind::Binary, op);
            e->bin = op.kind == Tok::Star    ? BinOp::Mul
                     : op.kind == Tok::Slash ? BinOp::Div
                                             : BinOp::Mod;
            e->a = l;
            e->b = parse_unary();
            l = e;
        }
        return l;
    }
    ExprPtr parse_unary() {
        const Token& at = peek();
        if (at.kind == Tok::Minus || at.kind == Tok::Not || at.kind == Tok::Star) {
            take();
            auto e = mk(ExprKind::Unary, at);
            e->un = at.kind == Tok::Minus ? UnOp::Neg
                    : at.kind == Tok::Not ? UnOp::Not
                                          : UnOp::Deref;
            e->a = parse_unary();
            return e;
        }
        return parse_postfix();
    }
    ExprPtr parse_postfix() {
        ExprPtr e = parse_primary();
        while (peek().kind == Tok::LBracket) {
            const Token& op = take();
            auto idx = mk(ExprKind::Index, op);
            idx->a = e;
            idx->b = parse_expr();
            expect(Tok::RBracket);
            e = idx;
        }
        return e;
    }
    ExprPtr parse_primary() {
        const Token& at = peek();
        switch (at.kind) {
            case Tok::Int: {
                take();
                auto e = mk(ExprKind::IntLit, at);
                e->ival = at.ival;
                return e;
            }
            case Tok::KwNull: {
                take();
                return mk(ExprKind::NullLit, at);
            }
            case Tok::LParen: {
                take();
                ExprPtr e = parse_expr();
                expect(Tok::RParen);
                return e;
            }
            case Tok::Ident: {
                take();
                if (peek().kind == Tok::LParen) {
                    take();
                    auto e = mk(ExprKind::Call, at);
                    e->name = at.text;
                    if (!accept(Tok::RParen)) {
                        do {
                            e->args.push_back(parse_expr());
                        } while (accept(Tok::Comma));
                        expect(Tok::RParen);
                    }
                    return e;
                }
                auto e = mk(ExprKind::Ident, at);
                e->name = at.text;
                return e;
            }
            default:
                fail(at, std::string("unexpected ") + tok_name(at.kind) + " in expression");
        }
    }

    // ---- post-parse bookkeeping -------------------------------------------

    static std::optional<int64_t> const_of(const ExprPtr& e) {
        if (!e) return std::nullopt;
        if (e->kind == ExprKind::IntLit) return e->ival;
        if (e->kind == ExprKind::Unary && e->un == UnOp::Neg && e->a &&
            e->a->kind == ExprKind::IntLit)
            return -e->a->ival;
        return std::nullopt;
    }

    // `v = v + c` / `v = c + v` ?
    static std::optional<std::pair<std::string, int64_t>> stride_of(const StmtPtr& s) {
        if (!s || s->kind != StmtKind::Assign || !s->lhs || s->lhs->kind != ExprKind::Ident)
            return std::nullopt;
        const std::string& v = s->lhs->name;
        const ExprPtr& r = s->rhs;
        if (!r || r->kind != ExprKind::Binary || r->bin != BinOp::Add) return std::nullopt;
        if (r->a->kind == ExprKind::Ident && r->a->name == v) {
            if (auto c = const_of(r->b)) return std::make_pair(v, *c);
        }
        if (r->b->kind == ExprKind::Ident && r->b->name == v) {
            if (auto c = const_of(r->a)) return std::make_pair(v, *c);
        }
        return std::nullopt;
    }

    void finish_function(FunctionDef& fn) {
        collect_block(fn, fn.body);
        std::sort(fn.loops.begin(), fn.loops.end(),
                  [](const Loop& a, const Loop& b) { return a.id < b.id; });
    }

    static int last_line(const std::vector<StmtPtr>& body) {
        int m = 0;
        for (const auto& s : body) {
            m = std::max(m, s->line);
            m = std::max(m, last_line(s->body));
            m = std::max(m, last_line(s->els));
        }
        return m;
    }
    static int first_line(const std::vector<StmtPtr>& body) {
        return body.empty() ? 0 : body.front()->line;
    }

    void collect_block(FunctionDef& fn, const std::vector<StmtPtr>& body) {
        for (size_t i = 0; i < body.size(); ++i) {
            const StmtPtr& s = body[i];
            fn.stmt_lines.insert(s->line);
            switch (s->kind) {
                case StmtKind::If:
                    collect_block(fn, s->body);
                    collect_block(fn, s->els);
                    break;
                case StmtKind::While:
                case StmtKind::For: {
                    Loop lp;
                    lp.id = s->loop_id;
                    lp.header_line = s->line;
                    lp.is_for = s->kind == StmtKind::For;
                    lp.guard = s->cond;
                    lp.body_first_line = first_line(s->body);
                    lp.body_last_line = std::max(s->line, last_line(s->body));
                    if (s->kind == StmtKind::For) {
                        std::optional<std::pair<std::string, int64_t>> st =
                            stride_of(s->step_stmt);
                        std::optional<int64_t> init;
                        std::string var;
                        if (s->init_stmt && s->init_stmt->kind == StmtKind::Decl) {
                            var = s->init_stmt->decl.name;
                            init = const_of(s->init_stmt->decl.init);
                        } else if (s->init_stmt && s->init_stmt->kind == StmtKind::Assign &&
                                   s->init_stmt->lhs->kind == ExprKind::Ident) {
                            var = s->init_stmt->lhs->name;
                            init = const_of(s->init_stmt->rhs);
                        }
                        if (st && init && st->first == var)
                            lp.induction = Loop::Hint{var, *init, st->second};
                    } else {
                        // while (...) { ...; v = v + c; } with a constant init of
                        // v textually just before the loop.
                        if (!s->body.empty()) {
                            if (auto st = stride_of(s->body.back())) {
                                std::optional<int64_t> init;
                                for (size_t j = i; j-- > 0;) {
                                    const StmtPtr& p = body[j];
                                    if (p->kind == StmtKind::Decl &&
                                        p->decl.name == st->first) {
                                        init = const_of(p->decl.init);
                                        break;
                                    }
                                    if (p->kind == StmtKind::Assign &&
                                        p->lhs->kind == ExprKind::Ident &&
                                        p->lhs->name == st->first) {
                                        init = const_of(p->rhs);
                                        break;
                                    }
                                }
                                if (init)
                                    lp.induction =
                                        Loop::Hint{st->first, *init, st->second};
                            }
                        }
                    }
                    fn.loops.push_back(std::move(lp));
                    if (s->init_stmt) fn.stmt_lines.insert(s->init_stmt->line);
                    collect_block(fn, s->body);
                    break;
                }
                default: break;
            }
        }
    }
};

} // namespace

void parse_source(ProjectIndex& index, const std::string& src, const std::string& path) {
    SourceUnit unit;
    unit.path = path;
    unit.line_count = static_cast<int>(std::count(src.begin(), src.end(), '\n')) + 1;
    index.files.push_back(unit);
    Parser p(index, lex(src, path), path);
    p.parse_unit();
}

ProjectIndex load_project(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir))
        throw InputError("project directory not found: " + dir.string());
    std::vector<fs::path> paths;
    for (const auto& ent : fs::recursive_directory_iterator(dir))
        if (ent.is_regular_file() && ent.path().extension() == ".mc")
            paths.push_back(ent.path());
    if (paths.empty())
        throw InputError("no .mc source files under: " + dir.string());
    std::vector<std::pair<std::string, fs::path>> rels;
    for (const auto& p : paths)
        rels.emplace_back(fs::relative(p, dir).generic_string(), p);
    std::sort(rels.begin(), rels.end());
    ProjectIndex index;
    for (const auto& [rel, p] : rels) {
        std::ifstream in(p);
        std::stringstream ss;
        ss << in.rdbuf();
        parse_source(index, ss.str(), rel);
    }
    return index;
}

std::shared_ptr<FunctionDef> parse_harness(ProjectIndex& index, const std::string& src,
                                           const std::string& pseudo_file) {
    Parser p(index, lex(src, pseudo_file), pseudo_file);
    auto fn = p.parse_single_function();
    fn->file = pseudo_file;
    return fn;
}

} // namespace soup
