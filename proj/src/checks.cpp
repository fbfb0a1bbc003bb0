#include "soup/checks.hpp"

#include <tuple>

#include "soup/diag.hpp"
#include "soup/printer.hpp"

namespace soup {

const char* check_kind_name(CheckKind k) {
    switch (k) {
        case CheckKind::NullDeref: return "null-deref";
        case CheckKind::InvalidDeref: return "invalid-deref";
        case CheckKind::DeallocatedDeref: return "deallocated-deref";
        case CheckKind::DeadObjectDeref: return "dead-object-deref";
        case CheckKind::OobPointerDeref: return "oob-pointer-deref";
        case CheckKind::ArrayLowerBound: return "array-lower-bound";
        case CheckKind::ArrayUpperBound: return "array-upper-bound";
        case CheckKind::SignedOverflowAdd: return "signed-overflow-add";
        case CheckKind::SignedOverflowSub: return "signed-overflow-sub";
        case CheckKind::SignedOverflowMul: return "signed-overflow-mul";
        case CheckKind::ShiftDistanceNegative: return "shift-distance-negative";
        case CheckKind::ShiftDistanceTooLarge: return "shift-distance-too-large";
        case CheckKind::DivByZero: return "div-by-zero";
        case CheckKind::MemcpySrcReadable: return "memcpy-src-readable";
        case CheckKind::MemcpyDstWriteable: return "memcpy-dst-writeable";
        case CheckKind::MemcpyOverlap: return "memcpy-overlap";
        case CheckKind::MemsetDstWriteable: return "memset-dst-writeable";
        case CheckKind::FreeOffsetZero: return "free-offset-zero";
        case CheckKind::FreeDynamic: return "free-dynamic";
        case CheckKind::DoubleFree: return "double-free";
        case CheckKind::UserAssert: return "user-assert";
    }
    return "?";
}

CheckKind check_kind_from_name(const std::string& name) {
    for (int k = 0; k <= static_cast<int>(CheckKind::UserAssert); ++k)
        if (name == check_kind_name(static_cast<CheckKind>(k)))
            return static_cast<CheckKind>(k);
    throw InputError("unknown property kind: " + name);
}

std::string PropertyCheck::id() const {
    return std::string(check_kind_name(kind)) + "@" + file + ":" + std::to_string(line) +
           ":" + std::to_string(ordinal);
}

int Instrumentation::find(int site, CheckKind kind) const {
    auto it = by_site.find(site);
    if (it == by_site.end()) return -1;
    for (int idx : it->second)
        if (checks[static_cast<size_t>(idx)].kind == kind) return idx;
    return -1;
}

namespace {

class Collector {
public:
    explicit Collector(Instrumentation& out) : out_(out) {}

    void function(const FunctionDef& fn) {
        fn_ = &fn;
        block(fn.body);
    }

private:
    Instrumentation& out_;
    const FunctionDef* fn_ = nullptr;
    std::map<std::tuple<int, std::string, int>, int> ordinals_; // (kind,file,line)

    void add(int site, CheckKind kind, int line, const std::string& guard) {
        PropertyCheck c;
        c.kind = kind;
        c.file = fn_->file;
        c.line = line;
        c.function = fn_->name;
        c.guard = guard;
        auto key = std::make_tuple(static_cast<int>(kind), c.file, line);
        c.ordinal = ordinals_[key]++;
        out_.by_site[site].push_back(static_cast<int>(out_.checks.size()));
        out_.checks.push_back(std::move(c));
    }

    void deref_checks(const Expr& at, const Expr& ptr, const std::string& what) {
        add(at.site, CheckKind::NullDeref, at.line, what + " != NULL");
        add(at.site, CheckKind::InvalidDeref, at.line, "valid(" + what + ")");
        add(at.site, CheckKind::DeallocatedDeref, at.line, "alive(" + what + ")");
        add(at.site, CheckKind::DeadObjectDeref, at.line, "!dead(" + what + ")");
        add(at.site, CheckKind::OobPointerDeref, at.line,
            "0 <= offset(" + what + ") && offset(" + what + ") < size_of_object(" +
                print_expr(ptr) + ")");
    }

    void expr(const Expr& e) {
        if (e.a) expr(*e.a);
        if (e.b) expr(*e.b);
        for (const auto& a : e.args) expr(*a);
        switch (e.kind) {
            case ExprKind::Unary:
                if (e.un == UnOp::Deref) deref_checks(e, *e.a, print_expr(e));
                break;
            case ExprKind::Index: {
                std::string idx = print_expr(*e.b);
                if (e.a->kind == ExprKind::Ident && e.a->array_len >= 0) {
                    add(e.site, CheckKind::ArrayLowerBound, e.line, "0 <= " + idx);
                    add(e.site, CheckKind::ArrayUpperBound, e.line,
                        idx + " < |" + e.a->name + "|");
                } else {
                    deref_checks(e, *e.a, print_expr(e));
                }
                break;
            }
            case ExprKind::Binary: {
                std::string a = print_expr(*e.a), b = print_expr(*e.b);
                switch (e.bin) {
                    case BinOp::Add:
                    case BinOp::Sub:
                    case BinOp::Mul:
                        if (e.type.base == Base::I32 && !e.type.ptr && !e.a->type.ptr) {
                            CheckKind k = e.bin == BinOp::Add ? CheckKind::SignedOverflowAdd
                                          : e.bin == BinOp::Sub ? CheckKind::SignedOverflowSub
                                                                : CheckKind::SignedOverflowMul;
                            const char* op = e.bin == BinOp::Add   ? " + "
                                             : e.bin == BinOp::Sub ? " - "
                                                                   : " * ";
                            add(e.site, k, e.line,
                                "no signed overflow in " + a + op + b);
                        }
                        break;
                    case BinOp::Div:
                    case BinOp::Mod:
                        add(e.site, CheckKind::DivByZero, e.line, b + " != 0");
                        break;
                    case BinOp::Shl:
                    case BinOp::Shr:
                        add(e.site, CheckKind::ShiftDistanceNegative, e.line, b + " >= 0");
                        add(e.site, CheckKind::ShiftDistanceTooLarge, e.line, b + " < 32");
                        break;
                    default: break;
                }
                break;
            }
            default: break;
        }
    }

    void block(const std::vector<StmtPtr>& body) {
        for (const auto& s : body) stmt(*s);
    }

    void stmt(const Stmt& s) {
        switch (s.kind) {
            case StmtKind::Decl:
                if (s.decl.init) expr(*s.decl.init);
                return;
            case StmtKind::Assign:
                expr(*s.rhs);
                expr(*s.lhs);
                return;
            case StmtKind::If:
                expr(*s.cond);
                block(s.body);
                block(s.els);
                return;
            case StmtKind::While:
                expr(*s.cond);
                block(s.body);
                return;
            case StmtKind::For:
                if (s.init_stmt) stmt(*s.init_stmt);
                expr(*s.cond);
                block(s.body);
                if (s.step_stmt) stmt(*s.step_stmt);
                return;
            case StmtKind::Return:
                if (s.cond) expr(*s.cond);
                return;
            case StmtKind::Assume:
                expr(*s.cond);
                return;
            case StmtKind::Assert:
                expr(*s.cond);
                add(s.site, CheckKind::UserAssert, s.line, print_expr(*s.cond));
                return;
            case StmtKind::Free: {
                expr(*s.cond);
                std::string p = print_expr(*s.cond);
                add(s.site, CheckKind::FreeOffsetZero, s.line, "offset(" + p + ") == 0");
                add(s.site, CheckKind::FreeDynamic, s.line, "dynamic(" + p + ")");
                add(s.site, CheckKind::DoubleFree, s.line, "alive(" + p + ")");
                return;
            }
            case StmtKind::Memcpy: {
                expr(*s.lhs);
                expr(*s.rhs);
                expr(*s.n);
                std::string d = print_expr(*s.lhs), src = print_expr(*s.rhs),
                            n = print_expr(*s.n);
                add(s.site, CheckKind::MemcpySrcReadable, s.line,
                    "readable(" + src + ", " + n + ")");
                add(s.site, CheckKind::MemcpyDstWriteable, s.line,
                    "writeable(" + d + ", " + n + ")");
                add(s.site, CheckKind::MemcpyOverlap, s.line,
                    "!overlaps(" + d + ", " + src + ", " + n + ")");
                return;
            }
            case StmtKind::Memset: {
                expr(*s.lhs);
                expr(*s.rhs);
                expr(*s.n);
                add(s.site, CheckKind::MemsetDstWriteable, s.line,
                    "writeable(" + print_expr(*s.lhs) + ", " + print_expr(*s.n) + ")");
                return;
            }
            case StmtKind::CallStmt:
                expr(*s.call);
                return;
            case StmtKind::SaturationProbe:
                return;
        }
    }
};

} // namespace

Instrumentation instrument(const std::vector<const FunctionDef*>& fns) {
    Instrumentation out;
    Collector col(out);
    for (const FunctionDef* fn : fns) col.function(*fn);
    return out;
}

} // namespace soup
