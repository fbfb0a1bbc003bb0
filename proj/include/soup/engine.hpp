#pragma once

#include <optional>
#include <string>

#include "soup/domains.hpp"
#include "soup/proof.hpp"
#include "soup/report.hpp"

namespace soup {

// Pin one harness symbol to an exact value during verification: used when
// validating inferred preconditions against concrete caller-supplied values.
// The pinned value replaces the symbol's nondet choice (even when it lies
// outside the enumerated domain), and harness assumptions over the symbol are
// suspended so the replay reflects the caller's context.
struct PinnedValue {
    std::string subject; // same syntax as precondition subjects
    int64_t value = 0;
};

struct EngineOptions {
    DomainConfig domains;
    ResourceBudget budget;
    int recursion_cap = 16;
    int trace_cap = 64;
    std::optional<PinnedValue> pin;
};

// Bounded verification by exhaustive enumeration of the proof's nondet space.
// Every run executes the unrolled in-scope functions from the harness down;
// each completed, pruned or violating run counts as one explored state.
// Never throws for verification-level problems; those come back as
// status == Error with a message.
VerificationReport verify(const UnitProof& proof, const ProjectIndex& index,
                          const EngineOptions& opts);

VerificationReport verify_pinned(const UnitProof& proof, const ProjectIndex& index,
                                 const EngineOptions& opts, const PinnedValue& pin);

} // namespace soup
