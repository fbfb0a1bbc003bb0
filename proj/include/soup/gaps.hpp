#pragma once

#include <optional>

#include "soup/agent.hpp"
#include "soup/engine.hpp"
#include "soup/proof.hpp"
#include "soup/report.hpp"

namespace soup {

enum class GapClass {
    LoopDependent,
    ConfigurationDependent,
    ExternalFunctionDependent,
    Unclassified,
};

const char* gap_class_name(GapClass c);

struct GapInfo {
    CoverageBlock block;
    GapClass cls = GapClass::Unclassified;
    // LoopDependent
    std::string loop_id;
    int needed_bound = 0;
    // ConfigurationDependent
    std::string config_name;
    int64_t config_value = 0;
    // ExternalFunctionDependent
    std::string callee;
    std::string havoc_param;
};

// Uncovered blocks that contain at least one property check.
std::vector<CoverageBlock> uncovered_property_blocks(const VerificationReport& report,
                                                     const std::vector<const FunctionDef*>& fns);

GapInfo classify_gap(const CoverageBlock& block, const UnitProof& proof,
                     const ProjectIndex& index, const VerificationReport& report);

// Applies the repair suggested by the classification to `proof`; false when the
// gap is unclassified or no repair applies.
bool apply_gap_repair(const GapInfo& gap, UnitProof& proof);

struct MinBoundEstimate {
    std::string loop_id;
    int bound = 0;
    std::string derivation; // human-readable explanation
};

// Smallest unwinding bound at which an access guarded by the loop's induction
// variable can step past the smallest plausible object extent: with start s,
// stride t and extent m the bound is ceil((m - s) / t) + 1.
std::optional<MinBoundEstimate> min_bound_to_violate(const Loop& loop, const FunctionDef& fn,
                                                     const UnitProof& proof,
                                                     const ProjectIndex& index);

struct BoundStageResult {
    UnitProof proof;
    VerificationReport report;
    // Recommended bounds the gate rejected (kept for the report).
    std::vector<MinBoundEstimate> unapplied;
};

// Property-guided refinement: repairs classified coverage gaps, then raises
// bounds of saturated loops to their minimum-to-violate estimates, gating
// every change.
BoundStageResult run_bound_stage(const UnitProof& start, const ProjectIndex& index,
                                 const EngineOptions& opts, Resolver& resolver,
                                 StageLog& log);

} // namespace soup
