#include "soup/typecheck.hpp"

#include <optional>

#include "soup/callgraph.hpp"
#include "soup/diag.hpp"

namespace soup {

namespace {

struct Binding {
    TypeRef type;
    int array_len = -1;
};

class Checker {
public:
    Checker(FunctionDef& fn, const ProjectIndex& index, const ExternSigs& externs)
        : fn_(fn), index_(index), externs_(externs) {}

    void run() {
        push_scope();
        for (const auto& p : fn_.params) declare(p.name, Binding{p.type, -1}, fn_.line);
        check_block(fn_.body);
        pop_scope();
    }

private:
    FunctionDef& fn_;
    const ProjectIndex& index_;
    const ExternSigs& externs_;
    std::vector<std::map<std::string, Binding>> scopes_;

    [[noreturn]] void fail(int line, const std::string& msg) const {
        throw SyntaxError(fn_.file, line, 0, msg + " (in function '" + fn_.name + "')");
    }

    void push_scope() { scopes_.emplace_back(); }
    void pop_scope() { scopes_.pop_back(); }

    void declare(const std::string& name, Binding b, int line) {
        for (const auto& sc : scopes_)
            if (sc.count(name)) fail(line, "redeclaration of '" + name + "'");
        if (index_.configs.count(name))
            fail(line, "'" + name + "' shadows a config value");
        scopes_.back()[name] = b;
    }

    std::optional<Binding> lookup(const std::string& name) const {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            auto f = it->find(name);
            if (f != it->end()) return f->second;
        }
        if (const GlobalVar* g = index_.global(name))
            return Binding{g->decl.type, g->decl.array_len};
        return std::nullopt;
    }

    static bool int_compat(const TypeRef& a, const TypeRef& b) {
        return a.is_int() && b.is_int();
    }

    void require_assignable(const TypeRef& dst, const Expr& rhs, int line) {
        if (dst.is_int()) {
            if (!rhs.type.is_int())
                fail(line, "cannot assign " + type_name(rhs.type) + " to " + type_name(dst));
            return;
        }
        if (dst.ptr) {
            if (rhs.kind == ExprKind::NullLit) return;
            if (rhs.type.ptr && rhs.type.base == dst.base) return;
            fail(line, "cannot assign " + type_name(rhs.type) + " to " + type_name(dst));
        }
    }

    TypeRef callee_ret(const std::string& name, int line) const {
        if (const FunctionDef* def = index_.resolve(name, fn_.file)) return def->ret;
        auto it = externs_.find(name);
        if (it != externs_.end()) return it->second;
        fail(line, "call to unknown function '" + name + "'");
    }

    const std::vector<Param>* callee_params(const std::string& name) const {
        if (const FunctionDef* def = index_.resolve(name, fn_.file)) return &def->params;
        return nullptr; // extern signature: arity/types unchecked
    }

    void check_call(Expr& e, const TypeRef* malloc_target) {
        const std::string& n = e.name;
        if (n == "nondet_u8" || n == "nondet_u32" || n == "nondet_i32" || n == "nondet_size") {
            if (!e.args.empty()) fail(e.line, n + " takes no arguments");
            e.type.ptr = false;
            e.type.base = n == "nondet_u8"    ? Base::U8
                          : n == "nondet_u32" ? Base::U32
                          : n == "nondet_i32" ? Base::I32
                                              : Base::Size;
            return;
        }
        if (n == "malloc") {
            if (e.args.size() != 1) fail(e.line, "malloc takes one argument");
            check_expr(*e.args[0]);
            if (!e.args[0]->type.is_int()) fail(e.line, "malloc size must be an integer");
            if (!malloc_target || !malloc_target->ptr)
                fail(e.line, "malloc may only initialize a pointer variable");
            e.type = *malloc_target;
            return;
        }
        for (auto& a : e.args) check_expr(*a);
        const std::vector<Param>* params = callee_params(n);
        e.type = callee_ret(n, e.line);
        if (params) {
            if (params->size() != e.args.size())
                fail(e.line, "wrong number of arguments to '" + n + "': got " +
                                 std::to_string(e.args.size()) + ", expected " +
                                 std::to_string(params->size()));
            for (size_t i = 0; i < params->size(); ++i)
                require_assignable((*params)[i].type, *e.args[i], e.line);
        }
    }

    void check_expr(Expr& e, const TypeRef* malloc_target = nullptr) {
        switch (e.kind) {
            case ExprKind::IntLit:
                e.type = {Base::I32, false};
                return;
            case ExprKind::NullLit:
                e.type = {Base::U8, true}; // placeholder pointer type
                return;
            case ExprKind::Ident: {
                if (auto b = lookup(e.name)) {
                    e.type = b->type;
                    e.array_len = b->array_len;
                    if (b->array_len >= 0) e.type.ptr = true; // decay
                    return;
                }
                auto cfg = index_.configs.find(e.name);
                if (cfg != index_.configs.end()) {
                    e.type = {Base::I32, false};
                    return;
                }
                fail(e.line, "use of undeclared identifier '" + e.name + "'");
            }
            case ExprKind::Unary: {
                check_expr(*e.a);
                if (e.un == UnOp::Deref) {
                    if (!e.a->type.ptr) fail(e.line, "cannot dereference a non-pointer");
                    e.type = {e.a->type.base, false};
                    return;
                }
                if (!e.a->type.is_int())
                    fail(e.line, "unary operator requires an integer operand");
                e.type = e.a->type.base == Base::I32 || e.un == UnOp::Not
                             ? TypeRef{Base::I32, false}
                             : e.a->type;
                return;
            }
            case ExprKind::Binary: {
                check_expr(*e.a);
                check_expr(*e.b);
                const TypeRef& ta = e.a->type;
                const TypeRef& tb = e.b->type;
                switch (e.bin) {
                    case BinOp::Eq:
                    case BinOp::Ne:
                        if (ta.ptr || tb.ptr) {
                            bool ok = (ta.ptr && tb.ptr && ta.base == tb.base) ||
                                      (ta.ptr && e.b->kind == ExprKind::NullLit) ||
                                      (tb.ptr && e.a->kind == ExprKind::NullLit);
                            if (!ok) fail(e.line, "invalid pointer comparison");
                            e.type = {Base::I32, false};
                            return;
                        }
                        [[fallthrough]];
                    case BinOp::Lt:
                    case BinOp::Le:
                    case BinOp::Gt:
                    case BinOp::Ge:
                    case BinOp::LAnd:
                    case BinOp::LOr:
                        if (!int_compat(ta, tb))
                            fail(e.line, "comparison requires integer operands");
                        e.type = {Base::I32, false};
                        return;
                    case BinOp::Add:
                    case BinOp::Sub:
                        if (ta.ptr) {
                            if (!tb.is_int()) fail(e.line, "pointer arithmetic needs an integer");
                            e.type = ta;
                            return;
                        }
                        if (tb.ptr) fail(e.line, "pointer must be the left operand");
                        [[fallthrough]];
                    case BinOp::Mul:
                    case BinOp::Div:
                    case BinOp::Mod:
                        if (!int_compat(ta, tb)) fail(e.line, "arithmetic requires integers");
                        e.type = {promote(ta.base, tb.base), false};
                        return;
                    case BinOp::Shl:
                    case BinOp::Shr:
                        if (!int_compat(ta, tb)) fail(e.line, "shift requires integers");
                        e.type = {promote(ta.base, ta.base), false};
                        return;
                }
                return;
            }
            case ExprKind::Index: {
                check_expr(*e.a);
                check_expr(*e.b);
                if (!e.a->type.ptr) fail(e.line, "subscript base must be a pointer or array");
                if (!e.b->type.is_int()) fail(e.line, "subscript index must be an integer");
                e.type = {e.a->type.base, false};
                return;
            }
            case ExprKind::Call:
                check_call(e, malloc_target);
                return;
        }
    }

    // C-style usual arithmetic conversions over {u8,u32,i32,size_t}: u8
    // promotes to i32; any 32-bit unsigned operand makes the result unsigned.
    static Base promote(Base a, Base b) {
        auto norm = [](Base x) { return x == Base::U8 ? Base::I32 : x; };
        a = norm(a);
        b = norm(b);
        if (a == Base::Size || b == Base::Size) return Base::Size;
        if (a == Base::U32 || b == Base::U32) return Base::U32;
        return Base::I32;
    }

    void check_cond(Expr& e) {
        check_expr(e);
        if (!e.type.is_int()) fail(e.line, "condition must be an integer expression");
    }

    void check_block(const std::vector<StmtPtr>& body) {
        push_scope();
        for (const auto& s : body) check_stmt(*s);
        pop_scope();
    }

    void check_stmt(Stmt& s) {
        switch (s.kind) {
            case StmtKind::Decl: {
                if (s.decl.init) {
                    check_expr(*s.decl.init, &s.decl.type);
                    require_assignable(s.decl.type, *s.decl.init, s.line);
                }
                declare(s.decl.name, Binding{s.decl.type, s.decl.array_len}, s.line);
                return;
            }
            case StmtKind::Assign: {
                check_expr(*s.lhs);
                if (s.lhs->kind == ExprKind::Ident && s.lhs->array_len >= 0)
                    fail(s.line, "cannot assign to an array");
                check_expr(*s.rhs, &s.lhs->type);
                require_assignable(s.lhs->type, *s.rhs, s.line);
                return;
            }
            case StmtKind::If:
                check_cond(*s.cond);
                check_block(s.body);
                check_block(s.els);
                return;
            case StmtKind::While:
                check_cond(*s.cond);
                check_block(s.body);
                return;
            case StmtKind::For:
                push_scope();
                if (s.init_stmt) check_stmt(*s.init_stmt);
                check_cond(*s.cond);
                if (s.step_stmt) check_stmt(*s.step_stmt);
                check_block(s.body);
                pop_scope();
                return;
            case StmtKind::Return:
                if (s.cond) {
                    check_expr(*s.cond);
                    if (fn_.ret.is_void()) fail(s.line, "void function returns a value");
                    require_assignable(fn_.ret, *s.cond, s.line);
                } else if (!fn_.ret.is_void()) {
                    fail(s.line, "non-void function returns no value");
                }
                return;
            case StmtKind::Assume:
            case StmtKind::Assert:
                check_cond(*s.cond);
                return;
            case StmtKind::Free:
                check_expr(*s.cond);
                if (!s.cond->type.ptr && s.cond->kind != ExprKind::NullLit)
                    fail(s.line, "free requires a pointer");
                return;
            case StmtKind::Memcpy:
            case StmtKind::Memset: {
                check_expr(*s.lhs);
                if (!s.lhs->type.ptr) fail(s.line, "destination must be a pointer");
                check_expr(*s.rhs);
                if (s.kind == StmtKind::Memcpy) {
                    if (!s.rhs->type.ptr) fail(s.line, "source must be a pointer");
                    if (s.rhs->type.base != s.lhs->type.base)
                        fail(s.line, "memcpy operands must have the same element type");
                } else if (!s.rhs->type.is_int()) {
                    fail(s.line, "memset value must be an integer");
                }
                check_expr(*s.n);
                if (!s.n->type.is_int()) fail(s.line, "length must be an integer");
                return;
            }
            case StmtKind::CallStmt:
                check_expr(*s.call);
                return;
            case StmtKind::SaturationProbe:
                return;
        }
    }
};

} // namespace

void typecheck_function(FunctionDef& fn, const ProjectIndex& index, const ExternSigs& externs) {
    Checker(fn, index, externs).run();
}

void typecheck_project(ProjectIndex& index, const ExternSigs& externs) {
    for (auto& fn : index.functions) typecheck_function(*fn, index, externs);
}

} // namespace soup
