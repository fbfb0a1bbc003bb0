#include "soup/proof.hpp"

#include <algorithm>

#include "soup/callgraph.hpp"
#include "soup/diag.hpp"
#include "soup/parser.hpp"
#include "soup/typecheck.hpp"

namespace soup {

const char* precat_name(PreCat c) {
    switch (c) {
        case PreCat::PointerNotNull: return "pointer-not-null";
        case PreCat::VariableConstant: return "variable-constant";
        case PreCat::VariableVariable: return "variable-variable";
        case PreCat::PointerOffset: return "pointer-offset";
    }
    return "?";
}

PreCat precat_from_name(const std::string& name) {
    for (PreCat c : {PreCat::PointerNotNull, PreCat::VariableConstant,
                     PreCat::VariableVariable, PreCat::PointerOffset})
        if (name == precat_name(c)) return c;
    throw InputError("unknown precondition category: " + name);
}

const char* rel_name(Rel r) {
    switch (r) {
        case Rel::Lt: return "<";
        case Rel::Le: return "<=";
        case Rel::Gt: return ">";
        case Rel::Ge: return ">=";
        case Rel::Eq: return "==";
        case Rel::Ne: return "!=";
    }
    return "?";
}

Rel rel_from_name(const std::string& name) {
    for (Rel r : {Rel::Lt, Rel::Le, Rel::Gt, Rel::Ge, Rel::Eq, Rel::Ne})
        if (name == rel_name(r)) return r;
    throw InputError("unknown relation: " + name);
}

std::optional<std::string> ret_of_subject(const std::string& subject) {
    const std::string pfx = "ret_of(";
    if (subject.size() > pfx.size() + 1 && subject.compare(0, pfx.size(), pfx) == 0 &&
        subject.back() == ')')
        return subject.substr(pfx.size(), subject.size() - pfx.size() - 1);
    return std::nullopt;
}

std::string PreconditionTerm::text() const {
    switch (category) {
        case PreCat::PointerNotNull:
            return subjects.at(0) + " != NULL";
        case PreCat::VariableConstant:
            return subjects.at(0) + " " + rel_name(rel) + " " + std::to_string(constant.value_or(0));
        case PreCat::VariableVariable:
            return subjects.at(0) + " " + rel_name(rel) + " " + subjects.at(1);
        case PreCat::PointerOffset: {
            std::string s = subjects.at(0) + " " + rel_name(rel) + " " + subjects.at(1);
            if (constant.value_or(0) != 0) s += " + " + std::to_string(*constant);
            return s;
        }
    }
    return "?";
}

int FunctionModel::type(const std::vector<PreconditionTerm>& pres) const {
    if (!havoc_params.empty()) return 3;
    for (const auto& p : pres)
        for (const auto& s : p.subjects)
            if (auto f = ret_of_subject(s); f && *f == name) return 2;
    return 1;
}

int UnitProof::size_lines() const {
    int n = static_cast<int>(std::count(harness.begin(), harness.end(), '\n'));
    if (!harness.empty() && harness.back() != '\n') ++n;
    n += static_cast<int>(env.function_models.size());
    n += static_cast<int>(env.preconditions.size());
    n += static_cast<int>(env.input_model.size());
    return n;
}

std::vector<const FunctionDef*> scope_functions(const UnitProof& proof,
                                                const ProjectIndex& index) {
    std::vector<const FunctionDef*> out;
    for (const auto& name : proof.scope.functions) {
        const FunctionDef* best = nullptr;
        int best_len = -1;
        if (const auto* cands = index.candidates(name)) {
            for (const auto& f : *cands) {
                if (!proof.scope.files.count(f->file)) continue;
                int len = common_path_prefix(f->file, proof.scope.entry_file);
                if (len > best_len) {
                    best_len = len;
                    best = f.get();
                }
            }
        }
        if (!best)
            throw InputError("scope function '" + name +
                             "' has no definition in the scope files");
        out.push_back(best);
    }
    std::sort(out.begin(), out.end(), [](const FunctionDef* a, const FunctionDef* b) {
        return std::tie(a->file, a->name) < std::tie(b->file, b->name);
    });
    return out;
}

namespace {

void collect_calls(const std::vector<StmtPtr>& body, std::vector<std::string>& out);

void collect_calls_expr(const Expr& e, std::vector<std::string>& out) {
    if (e.kind == ExprKind::Call && !is_intrinsic_call(e.name)) out.push_back(e.name);
    if (e.a) collect_calls_expr(*e.a, out);
    if (e.b) collect_calls_expr(*e.b, out);
    for (const auto& a : e.args) collect_calls_expr(*a, out);
}

void collect_calls(const std::vector<StmtPtr>& body, std::vector<std::string>& out) {
    for (const auto& s : body) {
        for (const ExprPtr& e : {s->lhs, s->rhs, s->cond, s->n, s->call})
            if (e) collect_calls_expr(*e, out);
        if (s->kind == StmtKind::Decl && s->decl.init) collect_calls_expr(*s->decl.init, out);
        if (s->init_stmt) collect_calls({s->init_stmt}, out);
        if (s->step_stmt) collect_calls({s->step_stmt}, out);
        collect_calls(s->body, out);
        collect_calls(s->els, out);
    }
}

} // namespace

ExternSigs model_extern_sigs(const UnitProof& proof);

ExternSigs model_extern_sigs(const UnitProof& proof) {
    ExternSigs sigs;
    for (const auto& [name, m] : proof.env.function_models) sigs[name] = m.ret.type;
    return sigs;
}

ValidityReport check_structural_validity(const UnitProof& proof, const ProjectIndex& index) {
    ValidityReport rep;
    ExternSigs externs = model_extern_sigs(proof);

    std::vector<const FunctionDef*> fns;
    std::shared_ptr<FunctionDef> harness;
    try {
        fns = scope_functions(proof, index);
        ProjectIndex scratch = {};
        scratch.next_site = 1'000'000'000; // keep harness sites out of project range
        harness = parse_harness(scratch, proof.harness, "<harness>");
        for (const FunctionDef* fn : fns)
            typecheck_function(const_cast<FunctionDef&>(*fn), index, externs);
        typecheck_function(*harness, index, externs);
        rep.compiles = true;
    } catch (const std::exception& e) {
        rep.messages.push_back(std::string("compile: ") + e.what());
        return rep;
    }

    std::vector<std::string> harness_calls;
    collect_calls(harness->body, harness_calls);
    int entry_calls = static_cast<int>(
        std::count(harness_calls.begin(), harness_calls.end(), proof.scope.entry));
    rep.calls_entry = entry_calls == 1;
    if (!rep.calls_entry)
        rep.messages.push_back("harness must call the entry exactly once, found " +
                               std::to_string(entry_calls) + " call(s)");
    for (const auto& c : harness_calls)
        if (c != proof.scope.entry) {
            rep.calls_entry = false;
            rep.messages.push_back("harness calls non-entry function '" + c + "'");
        }

    bool ok = true;
    auto complain = [&](const std::string& m) {
        ok = false;
        rep.messages.push_back(m);
    };

    if (!proof.scope.functions.count(proof.scope.entry))
        complain("entry '" + proof.scope.entry + "' is not in the scope function set");

    for (const auto& [name, m] : proof.env.function_models) {
        if (m.name != name) complain("model name mismatch for '" + name + "'");
        if (proof.scope.functions.count(name))
            complain("function '" + name + "' is both in scope and modeled");
    }

    std::vector<std::string> callees;
    for (const FunctionDef* fn : fns) collect_calls(fn->body, callees);
    std::sort(callees.begin(), callees.end());
    callees.erase(std::unique(callees.begin(), callees.end()), callees.end());
    for (const auto& c : callees) {
        if (proof.scope.functions.count(c)) continue;
        if (!proof.env.function_models.count(c))
            complain("out-of-scope callee '" + c + "' has no model");
    }

    std::set<std::string> loop_ids;
    for (const FunctionDef* fn : fns)
        for (const auto& lp : fn->loops) loop_ids.insert(lp.id);
    for (const auto& lp : harness->loops) loop_ids.insert(lp.id);
    for (const auto& [id, b] : proof.bounds.bounds) {
        if (b < 1) complain("bound for '" + id + "' must be >= 1");
        if (!loop_ids.count(id)) complain("bound refers to unknown loop '" + id + "'");
    }
    if (proof.bounds.default_bound < 1) complain("default bound must be >= 1");

    const FunctionDef* entry = nullptr;
    for (const FunctionDef* fn : fns)
        if (fn->name == proof.scope.entry) entry = fn;
    std::set<std::string> symbols;
    if (entry)
        for (const auto& p : entry->params) symbols.insert(p.name);
    for (const auto& is : proof.env.input_model) {
        if (!is.size_symbol.empty()) symbols.insert(is.size_symbol);
        if (entry) {
            bool found = false;
            for (const auto& p : entry->params) found = found || p.name == is.param;
            if (!found)
                complain("input model names unknown parameter '" + is.param + "'");
        }
    }
    for (const auto& pre : proof.env.preconditions) {
        for (const auto& s : pre.subjects) {
            if (auto f = ret_of_subject(s)) {
                if (!proof.env.function_models.count(*f))
                    complain("precondition refers to unmodeled function '" + *f + "'");
            } else if (!symbols.count(s)) {
                complain("precondition subject '" + s + "' is not a harness symbol");
            }
        }
    }

    for (const auto& [name, c] : proof.env.config_overrides) {
        auto it = index.configs.find(name);
        if (it == index.configs.end()) {
            complain("override of unknown config '" + name + "'");
        } else if (it->second.candidates &&
                   std::find(it->second.candidates->begin(), it->second.candidates->end(),
                             c) == it->second.candidates->end()) {
            complain("override value " + std::to_string(c) +
                     " not among candidates of config '" + name + "'");
        }
    }

    rep.models_well_formed = ok;
    return rep;
}

} // namespace soup
