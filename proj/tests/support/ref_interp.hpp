#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "soup/ast.hpp"
#include "soup/domains.hpp"

namespace soup::testing {

// Independent reference interpreter for the scalar subset of the language
// (scalar parameters and locals, fixed local arrays, arithmetic, if/while/for,
// assert/assume).  Loops run natively, capped at `loop_cap` iterations; a run
// that would iterate further is abandoned, mirroring unwind-as-assume.
// Deliberately implemented without the engine's unroller or choice stack.

struct RefOutcome {
    std::set<std::string> violated; // property check ids
    uint64_t runs = 0;
};

// Runs `fn` once with the given parameter values; returns the ids of the
// properties violated on that run (at most one: runs stop at the first).
std::set<std::string> ref_run(const FunctionDef& fn, const ProjectIndex& index,
                              const std::vector<int64_t>& args, int loop_cap);

// Exhaustively enumerates all parameter assignments from `domains`.
RefOutcome ref_enumerate(const FunctionDef& fn, const ProjectIndex& index,
                         const DomainConfig& domains, int loop_cap);

} // namespace soup::testing
