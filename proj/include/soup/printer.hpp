#pragma once

#include <string>

#include "soup/ast.hpp"

namespace soup {

std::string print_expr(const Expr& e);
std::string print_stmt(const Stmt& s, int indent);
std::string print_function(const FunctionDef& fn);
// Reprints one source unit (configs + globals + functions declared in `path`)
// as parseable source text.
std::string print_unit(const ProjectIndex& index, const std::string& path);

} // namespace soup
