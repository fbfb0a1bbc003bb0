#pragma once

#include <vector>

#include "soup/ast.hpp"
#include "soup/proof.hpp"

namespace soup {

// Returns a loop-free copy of `body`: every loop is expanded to its bound from
// `bounds`, with a SaturationProbe in place of the residual iteration.  A run
// that reaches a probe with the guard still true is pruned (unwind-as-assume)
// and the loop is flagged saturated.  Unexpanded statements and all
// expressions are shared with the original AST, so site ids and line numbers
// are preserved.
std::vector<StmtPtr> unroll_body(const std::vector<StmtPtr>& body, const LoopBoundMap& bounds);

} // namespace soup
