#include "soup/slice.hpp"

#include <algorithm>

#include "soup/callgraph.hpp"

namespace soup {

namespace {

void walk_stmts(const std::vector<StmtPtr>& body, const std::function<void(const Stmt&)>& f) {
    for (const auto& s : body) {
        f(*s);
        if (s->init_stmt) f(*s->init_stmt);
        walk_stmts(s->body, f);
        walk_stmts(s->els, f);
        if (s->step_stmt) f(*s->step_stmt);
    }
}

void walk_exprs_of(const Expr& e, const std::function<void(const Expr&)>& f) {
    f(e);
    if (e.a) walk_exprs_of(*e.a, f);
    if (e.b) walk_exprs_of(*e.b, f);
    for (const auto& a : e.args) walk_exprs_of(*a, f);
}

} // namespace

void for_each_stmt(const FunctionDef& fn, const std::function<void(const Stmt&)>& f) {
    walk_stmts(fn.body, f);
}

void for_each_expr(const FunctionDef& fn, const std::function<void(const Expr&)>& f) {
    for_each_stmt(fn, [&](const Stmt& s) {
        for (const ExprPtr& e : {s.lhs, s.rhs, s.cond, s.n, s.call})
            if (e) walk_exprs_of(*e, f);
        if (s.kind == StmtKind::Decl && s.decl.init) walk_exprs_of(*s.decl.init, f);
    });
}

const Stmt* find_loop_stmt(const FunctionDef& fn, const std::string& loop_id) {
    const Stmt* found = nullptr;
    for_each_stmt(fn, [&](const Stmt& s) {
        if ((s.kind == StmtKind::While || s.kind == StmtKind::For) && s.loop_id == loop_id)
            found = &s;
    });
    return found;
}

std::optional<int64_t> fold_const(const Expr& e, const ProjectIndex& index,
                                  const std::map<std::string, int64_t>& config_overrides) {
    switch (e.kind) {
        case ExprKind::IntLit: return e.ival;
        case ExprKind::Ident: {
            auto ov = config_overrides.find(e.name);
            if (ov != config_overrides.end()) return ov->second;
            auto it = index.configs.find(e.name);
            if (it != index.configs.end()) return it->second.value;
            return std::nullopt;
        }
        case ExprKind::Unary: {
            auto a = fold_const(*e.a, index, config_overrides);
            if (!a) return std::nullopt;
            if (e.un == UnOp::Neg) return -*a;
            if (e.un == UnOp::Not) return *a == 0 ? 1 : 0;
            return std::nullopt;
        }
        case ExprKind::Binary: {
            auto a = fold_const(*e.a, index, config_overrides);
            auto b = fold_const(*e.b, index, config_overrides);
            if (!a || !b) return std::nullopt;
            switch (e.bin) {
                case BinOp::Add: return *a + *b;
                case BinOp::Sub: return *a - *b;
                case BinOp::Mul: return *a * *b;
                case BinOp::Div:
                    if (*b == 0) return std::nullopt;
                    return *a / *b;
                case BinOp::Mod:
                    if (*b == 0) return std::nullopt;
                    return *a % *b;
                case BinOp::Shl: return *a << *b;
                case BinOp::Shr: return *a >> *b;
                case BinOp::Lt: return *a < *b ? 1 : 0;
                case BinOp::Le: return *a <= *b ? 1 : 0;
                case BinOp::Gt: return *a > *b ? 1 : 0;
                case BinOp::Ge: return *a >= *b ? 1 : 0;
                case BinOp::Eq: return *a == *b ? 1 : 0;
                case BinOp::Ne: return *a != *b ? 1 : 0;
                case BinOp::LAnd: return (*a != 0 && *b != 0) ? 1 : 0;
                case BinOp::LOr: return (*a != 0 || *b != 0) ? 1 : 0;
            }
            return std::nullopt;
        }
        default: return std::nullopt;
    }
}

bool mentions(const Expr& e, const std::string& name) {
    bool found = false;
    walk_exprs_of(e, [&](const Expr& x) {
        if (x.kind == ExprKind::Ident && x.name == name) found = true;
    });
    return found;
}

namespace {

// Size in elements of the object the caller passes as `arg`: fixed arrays and
// constant-size malloc'ed locals are recognized.
std::optional<int64_t> passed_object_size(const Expr& arg, const FunctionDef& caller,
                                          const ProjectIndex& index) {
    if (arg.kind != ExprKind::Ident) return std::nullopt;
    if (arg.array_len >= 0) return arg.array_len;
    // Fixed-array local, or a pointer initialized by a constant-size malloc.
    std::optional<int64_t> size;
    for_each_stmt(caller, [&](const Stmt& s) {
        if (s.kind == StmtKind::Decl && s.decl.name == arg.name && s.decl.array_len >= 0) {
            size = s.decl.array_len;
            return;
        }
        const Expr* rhs = nullptr;
        if (s.kind == StmtKind::Decl && s.decl.name == arg.name && s.decl.init)
            rhs = s.decl.init.get();
        else if (s.kind == StmtKind::Assign && s.lhs->kind == ExprKind::Ident &&
                 s.lhs->name == arg.name)
            rhs = s.rhs.get();
        if (rhs && rhs->kind == ExprKind::Call && rhs->name == "malloc")
            size = fold_const(*rhs->args[0], index, {});
    });
    if (!size) {
        // Parameter-passed arrays would need caller-of-caller analysis; out of
        // reach for this syntactic pass.
        const GlobalVar* g = index.global(arg.name);
        if (g && g->decl.array_len >= 0) return g->decl.array_len;
    }
    return size;
}

} // namespace

std::optional<ExtentInfo> entry_param_extent(const std::string& param, const UnitProof& proof,
                                             const ProjectIndex& index) {
    const FunctionDef* entry = nullptr;
    if (const auto* cands = index.candidates(proof.scope.entry))
        for (const auto& f : *cands)
            if (f->file == proof.scope.entry_file) entry = f.get();
    if (!entry) return std::nullopt;
    int pos = -1;
    for (size_t i = 0; i < entry->params.size(); ++i)
        if (entry->params[i].name == param) pos = static_cast<int>(i);
    if (pos < 0 || !entry->params[static_cast<size_t>(pos)].type.ptr) return std::nullopt;

    // (1) concrete objects at real call sites of the entry
    std::optional<int64_t> best;
    std::string how;
    for (const auto& fn : index.functions) {
        if (fn->name == proof.scope.entry) continue;
        for_each_expr(*fn, [&](const Expr& e) {
            if (e.kind != ExprKind::Call || e.name != proof.scope.entry) return;
            if (static_cast<int>(e.args.size()) <= pos) return;
            auto sz = passed_object_size(*e.args[static_cast<size_t>(pos)], *fn, index);
            if (!sz) return;
            if (!best || *sz < *best) {
                best = *sz;
                how = "call site " + fn->file + ":" + std::to_string(e.line) +
                      " passes an object of " + std::to_string(*sz) + " elements";
            }
        });
    }
    if (best) return ExtentInfo{*best, how, true};

    // (2) harness lower bound on the exposed size symbol
    for (const auto& is : proof.env.input_model) {
        if (is.param != param || !is.type.ptr) continue;
        int64_t lo = is.size_lo;
        std::string why = "harness allocates at least " + std::to_string(lo) + " elements";
        for (const auto& pre : proof.env.preconditions) {
            if (pre.category != PreCat::VariableConstant || pre.subjects.at(0) != is.size_symbol)
                continue;
            if (pre.rel == Rel::Ge && pre.constant && *pre.constant > lo) {
                lo = *pre.constant;
                why = "environment assumes " + pre.text();
            } else if (pre.rel == Rel::Gt && pre.constant && *pre.constant + 1 > lo) {
                lo = *pre.constant + 1;
                why = "environment assumes " + pre.text();
            }
        }
        return ExtentInfo{lo, why, false};
    }
    return std::nullopt;
}

std::optional<std::string> source_symbol_of(const std::string& name, const FunctionDef& fn,
                                            const UnitProof& proof) {
    if (fn.name == proof.scope.entry)
        for (const auto& p : fn.params)
            if (p.name == name && p.type.is_int()) return name;
    std::optional<std::string> src;
    for_each_stmt(fn, [&](const Stmt& s) {
        const Expr* rhs = nullptr;
        if (s.kind == StmtKind::Decl && s.decl.name == name && s.decl.init)
            rhs = s.decl.init.get();
        else if (s.kind == StmtKind::Assign && s.lhs->kind == ExprKind::Ident &&
                 s.lhs->name == name)
            rhs = s.rhs.get();
        if (rhs && rhs->kind == ExprKind::Call && proof.env.function_models.count(rhs->name))
            if (!src) src = "ret_of(" + rhs->name + ")";
    });
    return src;
}

std::vector<std::string> entry_callsite_descriptions(const UnitProof& proof,
                                                     const ProjectIndex& index) {
    std::vector<std::string> out;
    CallGraph cg = build_call_graph(index);
    for (const auto& site : callsites_of(cg, proof.scope.entry))
        out.push_back(site.caller_file + ":" + std::to_string(site.line) + " (" +
                      site.caller + ")");
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace soup
