#pragma once

#include <map>
#include <string>
#include <vector>

#include "soup/ast.hpp"

namespace soup {

// Return types of callees that have no definition in the index (modeled
// externals), keyed by name.
using ExternSigs = std::map<std::string, TypeRef>;

// Annotates expression types in `fn` and reports type errors as SyntaxError.
// Call signatures resolve against the index first, then `externs`.
void typecheck_function(FunctionDef& fn, const ProjectIndex& index, const ExternSigs& externs);

// Typechecks every function of the project.
void typecheck_project(ProjectIndex& index, const ExternSigs& externs = {});

} // namespace soup
