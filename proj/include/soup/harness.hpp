#pragma once

#include <map>
#include <string>
#include <vector>

#include "soup/domains.hpp"
#include "soup/proof.hpp"

namespace soup {

struct HarnessResult {
    std::string source; // `void harness() { ... }`
    std::vector<InitSpec> inputs;
};

// Type-directed harness for `entry`: primitives become nondet values, pointer
// parameters become nondet-sized allocations with the size exposed as
// `<param>_size` and a not-NULL assumption.
HarnessResult synthesize_input_model(const FunctionDef& entry, const DomainConfig& domains);

// Type-1 models for every out-of-scope callee reachable from the in-scope
// functions.  Throws InputError naming the callee when its signature is
// unknown (no definition anywhere in the project).
std::map<std::string, FunctionModel> model_external_callees(const VerificationScope& scope,
                                                            const ProjectIndex& index,
                                                            const DomainConfig& domains);

} // namespace soup
