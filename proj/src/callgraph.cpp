#include "soup/callgraph.hpp"

#include <algorithm>
#include <deque>

namespace soup {

bool is_intrinsic_call(const std::string& name) {
    return name == "nondet_u8" || name == "nondet_u32" || name == "nondet_i32" ||
           name == "nondet_size" || name == "malloc";
}

namespace {

void walk_expr(const Expr& e, std::vector<std::pair<std::string, int>>& calls) {
    if (e.kind == ExprKind::Call && !is_intrinsic_call(e.name))
        calls.emplace_back(e.name, e.line);
    if (e.a) walk_expr(*e.a, calls);
    if (e.b) walk_expr(*e.b, calls);
    for (const auto& a : e.args) walk_expr(*a, calls);
}

void walk_block(const std::vector<StmtPtr>& body,
                std::vector<std::pair<std::string, int>>& calls) {
    for (const auto& s : body) {
        for (const ExprPtr& e : {s->lhs, s->rhs, s->cond, s->n, s->call})
            if (e) walk_expr(*e, calls);
        if (s->init_stmt) walk_block({s->init_stmt}, calls);
        if (s->step_stmt) walk_block({s->step_stmt}, calls);
        if (s->kind == StmtKind::Decl && s->decl.init) walk_expr(*s->decl.init, calls);
        walk_block(s->body, calls);
        walk_block(s->els, calls);
    }
}

} // namespace

std::vector<std::pair<std::string, int>> direct_calls(const FunctionDef& fn);

std::vector<std::pair<std::string, int>> direct_calls(const FunctionDef& fn) {
    std::vector<std::pair<std::string, int>> calls;
    walk_block(fn.body, calls);
    return calls;
}

CallGraph build_call_graph(const ProjectIndex& index) {
    CallGraph cg;
    for (const auto& fn : index.functions) {
        auto calls = direct_calls(*fn);
        std::vector<std::string> callees;
        for (const auto& [name, line] : calls) {
            callees.push_back(name);
            cg.sites.push_back(CallSite{fn->name, fn->file, line, name});
            if (!index.candidates(name)) cg.unresolved.insert(name);
        }
        std::sort(callees.begin(), callees.end());
        callees.erase(std::unique(callees.begin(), callees.end()), callees.end());
        cg.edges[CallGraph::key(*fn)] = std::move(callees);
    }
    std::sort(cg.sites.begin(), cg.sites.end(), [](const CallSite& a, const CallSite& b) {
        return std::tie(a.caller_file, a.line, a.callee) <
               std::tie(b.caller_file, b.line, b.callee);
    });
    return cg;
}

std::vector<CallSite> callsites_of(const CallGraph& cg, const std::string& name) {
    std::vector<CallSite> out;
    for (const auto& s : cg.sites)
        if (s.callee == name) out.push_back(s);
    return out;
}

std::set<std::string> reachable_within(const ProjectIndex& index, const std::string& entry,
                                       const std::string& entry_file,
                                       const std::set<std::string>& files) {
    // Resolve among definitions inside `files` only, preferring the candidate
    // sharing the longest path prefix with the caller's file.
    auto resolve_in = [&](const std::string& name,
                          const std::string& from) -> const FunctionDef* {
        auto* cands = index.candidates(name);
        if (!cands) return nullptr;
        const FunctionDef* best = nullptr;
        int best_len = -1;
        for (const auto& f : *cands) {
            if (!files.count(f->file)) continue;
            int len = common_path_prefix(f->file, from);
            if (len > best_len) {
                best_len = len;
                best = f.get();
            }
        }
        return best;
    };
    std::set<std::string> seen;
    std::deque<const FunctionDef*> work;
    const FunctionDef* start = resolve_in(entry, entry_file);
    if (!start) return seen;
    work.push_back(start);
    seen.insert(start->name);
    while (!work.empty()) {
        const FunctionDef* fn = work.front();
        work.pop_front();
        for (const auto& [callee, line] : direct_calls(*fn)) {
            (void)line;
            const FunctionDef* def = resolve_in(callee, fn->file);
            if (!def) continue;
            if (seen.insert(def->name).second) work.push_back(def);
        }
    }
    return seen;
}

} // namespace soup
