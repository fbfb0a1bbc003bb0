#include "soup/widening.hpp"

#include <json.hpp>

#include "soup/callgraph.hpp"
#include "soup/diag.hpp"
#include "soup/harness.hpp"
#include "soup/manifest.hpp"

namespace soup {

using json = nlohmann::ordered_json;

namespace {

const FunctionDef* find_entry(const ProjectIndex& index, const std::string& entry) {
    const auto* cands = index.candidates(entry);
    if (!cands || cands->empty())
        throw InputError("entry function not found: '" + entry + "'");
    // Ambiguous entry names resolve to the lexicographically first file.
    const FunctionDef* best = cands->front().get();
    for (const auto& f : *cands)
        if (f->file < best->file) best = f.get();
    return best;
}

void rebuild_scope_contents(UnitProof& proof, const ProjectIndex& index,
                            const DomainConfig& domains) {
    proof.scope.functions = reachable_within(index, proof.scope.entry,
                                             proof.scope.entry_file, proof.scope.files);
    proof.env.function_models = model_external_callees(proof.scope, index, domains);
}

} // namespace

UnitProof init_proof(const ProjectIndex& index, const std::string& entry,
                     const DomainConfig& domains) {
    const FunctionDef* def = find_entry(index, entry);
    UnitProof proof;
    proof.scope.entry = entry;
    proof.scope.entry_file = def->file;
    proof.scope.files = {def->file};
    proof.scope.level = 0;
    proof.bounds.default_bound = 1;
    rebuild_scope_contents(proof, index, domains);
    HarnessResult h = synthesize_input_model(*def, domains);
    proof.harness = h.source;
    proof.env.input_model = h.inputs;
    return proof;
}

bool within_budget(const VerificationReport& report) {
    return report.status != VerifyStatus::InconclusiveBudget &&
           report.status != VerifyStatus::Error;
}

bool widen_by_one_file_level(UnitProof& proof, const ProjectIndex& index,
                             const DomainConfig& domains) {
    CallGraph cg = build_call_graph(index);
    std::set<std::string> new_files;
    for (const auto& [name, model] : proof.env.function_models) {
        (void)model;
        // Resolve the modeled callee's defining file per call site; ambiguity
        // settles toward the caller's path.
        for (const auto& site : callsites_of(cg, name)) {
            if (!proof.scope.functions.count(site.caller) ||
                !proof.scope.files.count(site.caller_file))
                continue;
            const FunctionDef* def = index.resolve(name, site.caller_file);
            if (def && !proof.scope.files.count(def->file)) new_files.insert(def->file);
        }
    }
    if (new_files.empty()) return false;
    for (const auto& f : new_files) proof.scope.files.insert(f);
    proof.scope.level += 1;
    proof.bounds = LoopBoundMap{};
    rebuild_scope_contents(proof, index, domains);
    return true;
}

namespace {

// Logs the stage-1 tasks (harness + models) for one proof; remote resolvers
// may substitute a harness, gated on structural validity.
void run_stage1_tasks(UnitProof& proof, const ProjectIndex& index, Resolver& resolver,
                      StageLog& log) {
    const FunctionDef* def = find_entry(index, proof.scope.entry);

    json payload;
    payload["entry"] = proof.scope.entry;
    json params = json::array();
    for (const auto& p : def->params)
        params.push_back({{"name", p.name}, {"type", type_name(p.type)}});
    payload["parameters"] = std::move(params);

    SemanticTask task;
    task.kind = TaskKind::SynthesizeInputModel;
    task.payload_json = payload.dump();
    task.constraints = "type-directed initialization only; no extra preconditions";

    TaskProposal rule;
    rule.content_json = json{{"harness", proof.harness}}.dump();
    rule.rationale = "type-directed harness";
    TaskProposal got = resolver.resolve(task, rule);

    AgentLogEvent ev;
    ev.stage = "scope";
    ev.task = task_kind_name(task.kind);
    ev.payload = task.payload_json;
    ev.proposal = got.content_json;
    ev.rationale = got.rationale;
    ev.from_fallback = got.from_fallback;
    ev.gated = true;

    std::string proposed = proof.harness;
    try {
        proposed = json::parse(got.content_json).at("harness");
    } catch (const std::exception&) {
        proposed = proof.harness;
    }
    UnitProof candidate = proof;
    candidate.harness = proposed;
    ValidityReport v = check_structural_validity(candidate, index);
    if (v.valid()) {
        proof.harness = proposed;
        ev.accepted = true;
    } else {
        ev.accepted = false;
        ev.gate_reasons = v.messages;
    }
    log.events.push_back(std::move(ev));

    for (const auto& [name, model] : proof.env.function_models) {
        json mp;
        mp["callee"] = name;
        mp["return"] = model.ret.type.is_void() ? "void" : initspec_to_text(model.ret);
        SemanticTask mt;
        mt.kind = TaskKind::ModelExternalCallee;
        mt.payload_json = mp.dump();
        mt.constraints = "unconstrained type-directed model";
        TaskProposal mrule;
        mrule.content_json =
            json{{"return", model.ret.type.is_void() ? "void" : initspec_to_text(model.ret)},
                 {"havoc", json::array()}}
                .dump();
        mrule.rationale = "signature-derived model";
        TaskProposal mgot = resolver.resolve(mt, mrule);
        AgentLogEvent mev;
        mev.stage = "scope";
        mev.task = task_kind_name(mt.kind);
        mev.payload = mt.payload_json;
        mev.proposal = mgot.content_json;
        mev.rationale = mgot.rationale;
        mev.from_fallback = mgot.from_fallback;
        mev.gated = false;
        log.events.push_back(std::move(mev));
    }
}

} // namespace

ScopeStageResult run_scope_stage(const ProjectIndex& index, const std::string& entry,
                                 int d_max, const EngineOptions& opts, Resolver& resolver,
                                 StageLog& log) {
    ScopeStageResult out;
    UnitProof proof = init_proof(index, entry, opts.domains);
    run_stage1_tasks(proof, index, resolver, log);

    VerificationReport rep = verify(proof, index, opts);
    out.probes.push_back({0, rep.states, within_budget(rep)});
    if (!within_budget(rep)) {
        // Even the narrowest scope breaches the budget; the level-0 proof is
        // kept for diagnostics but carries no conclusive report.
        out.budget_insufficient = true;
        out.proof = proof;
        out.report = rep;
        return out;
    }
    out.proof = proof;
    out.report = rep;

    for (int level = 1; level <= d_max; ++level) {
        UnitProof wider = out.proof;
        if (!widen_by_one_file_level(wider, index, opts.domains)) break;
        run_stage1_tasks(wider, index, resolver, log);
        VerificationReport wrep = verify(wider, index, opts);
        out.probes.push_back({level, wrep.states, within_budget(wrep)});
        if (!within_budget(wrep)) break;
        out.proof = wider;
        out.report = wrep;
    }
    return out;
}

} // namespace soup
