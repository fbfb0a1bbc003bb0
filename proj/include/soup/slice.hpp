#pragma once

#include <functional>
#include <optional>
#include <string>

#include "soup/ast.hpp"
#include "soup/proof.hpp"

namespace soup {

// Lightweight syntactic analyses shared by the refinement stages.

// Visits every statement of `fn` (including loop init/step) in textual order.
void for_each_stmt(const FunctionDef& fn, const std::function<void(const Stmt&)>& f);
// Visits every expression of `fn`.
void for_each_expr(const FunctionDef& fn, const std::function<void(const Expr&)>& f);

// The loop statement carrying `loop_id`, or nullptr.
const Stmt* find_loop_stmt(const FunctionDef& fn, const std::string& loop_id);

// Constant folding over literals and config values.
std::optional<int64_t> fold_const(const Expr& e, const ProjectIndex& index,
                                  const std::map<std::string, int64_t>& config_overrides);

// True when `e` mentions identifier `name`.
bool mentions(const Expr& e, const std::string& name);

// Smallest plausible extent (in elements) of the object behind an entry
// pointer parameter: the minimum over concrete objects passed at real call
// sites of the entry, else the harness' lower size bound.
struct ExtentInfo {
    int64_t extent = 0;
    std::string how;          // human-readable derivation
    bool from_callsite = false;
};
std::optional<ExtentInfo> entry_param_extent(const std::string& param, const UnitProof& proof,
                                             const ProjectIndex& index);

// Where the value of identifier `name` inside `fn` comes from, expressed as a
// precondition subject: the identifier itself when it is a scalar parameter of
// the entry, or "ret_of(g)" when it is assigned from a modeled callee.
std::optional<std::string> source_symbol_of(const std::string& name, const FunctionDef& fn,
                                            const UnitProof& proof);

// Description of every real call site of the entry (excluding the harness).
std::vector<std::string> entry_callsite_descriptions(const UnitProof& proof,
                                                     const ProjectIndex& index);

} // namespace soup
