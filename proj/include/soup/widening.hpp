#pragma once

#include "soup/agent.hpp"
#include "soup/engine.hpp"
#include "soup/proof.hpp"

namespace soup {

// Level-0 proof: the entry's own file, functions reachable from the entry
// inside that file, all bounds 1, type-directed harness and callee models.
UnitProof init_proof(const ProjectIndex& index, const std::string& entry,
                     const DomainConfig& domains);

// True when verification finished without exhausting a budget.
bool within_budget(const VerificationReport& report);

// One widening step: adds the files defining currently modeled callees and
// recomputes the reachable function set.  Returns false when nothing widened.
bool widen_by_one_file_level(UnitProof& proof, const ProjectIndex& index,
                             const DomainConfig& domains);

struct ScopeProbe {
    int level = 0;
    uint64_t states = 0;
    bool conclusive = false;
};

struct ScopeStageResult {
    UnitProof proof;
    VerificationReport report;
    bool budget_insufficient = false; // level 0 already breaches the budget
    std::vector<ScopeProbe> probes;
};

// Resource-aware widening: starts at level 0, widens while the budget allows,
// up to `d_max` levels; keeps the last scope that verified within budget.
ScopeStageResult run_scope_stage(const ProjectIndex& index, const std::string& entry,
                                 int d_max, const EngineOptions& opts, Resolver& resolver,
                                 StageLog& log);

} // namespace soup
