#pragma once

#include <optional>

#include "soup/agent.hpp"
#include "soup/engine.hpp"
#include "soup/proof.hpp"
#include "soup/report.hpp"

namespace soup {

// Violations in deterministic (file, line, kind) order.
std::vector<Violation> parse_violation_report(const VerificationReport& report);

// Candidate preconditions for one violation, most specific first.  Empty when
// no grammar instance suppresses it.
std::vector<PreconditionTerm> infer_precondition(const Violation& v, const UnitProof& proof,
                                                 const ProjectIndex& index);

enum class ValidationOutcome {
    Retained,  // every real context satisfies the precondition
    Weakened,  // weakened until contexts satisfied, then retained
    Rejected,  // a real context violates it and re-triggers the property
    Vacuous,   // no context to check against; retained as stated
};

const char* validation_outcome_name(ValidationOutcome o);

struct ValidationResult {
    ValidationOutcome outcome = ValidationOutcome::Vacuous;
    PreconditionTerm term; // possibly weakened
    // Context descriptions (callsites / implementations checked).
    std::vector<std::string> contexts;
    // For Rejected: the concrete subject value that re-triggers the property.
    std::optional<int64_t> breaking_value;
    // Properties violated while replaying the breaking context (the linked
    // sinks of the resulting error).
    std::vector<std::string> linked_sinks;
};

// Validates one inferred term against the program outside the scope: ret_of
// subjects against the modeled function's real implementations, input symbols
// against concrete entry call sites.
ValidationResult validate_precondition(const PreconditionTerm& term, const std::string& target_property,
                                       const UnitProof& proof, const ProjectIndex& index,
                                       const EngineOptions& opts);

// One minimal weakening step admitting `observed`; nullopt when the term
// cannot be weakened (e.g. pointer-not-null).
std::optional<PreconditionTerm> weaken_precondition(const PreconditionTerm& term,
                                                    int64_t observed);

struct MemorySafetyError {
    PropertyCheck property;
    Witness witness;
    std::optional<PreconditionTerm> rejected_precondition;
    std::vector<std::string> linked_sinks; // property ids co-triggered by the rejection context
    std::vector<std::string> contexts;     // where the offending values come from
};

struct SuppressedEntry {
    std::string property; // property id
    PreconditionTerm term;
    bool validated = false;
};

struct EnvStageResult {
    UnitProof proof;
    VerificationReport report;
    std::vector<MemorySafetyError> errors;
    std::vector<SuppressedEntry> suppressed;
};

// Context-aware environment refinement: per violation, infer -> gate ->
// validate; retained terms join the environment, rejected ones become
// reported errors carrying their rejected precondition.
EnvStageResult run_env_stage(const UnitProof& start, const ProjectIndex& index,
                             const EngineOptions& opts, Resolver& resolver, StageLog& log);

// errors.json payload for the pipeline.
std::string errors_to_json(const EnvStageResult& result);

} // namespace soup
