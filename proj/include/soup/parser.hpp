#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "soup/ast.hpp"

namespace soup {

// Parses one source buffer into `index`, appending its functions, configs and
// globals.  `path` is recorded on every definition and used in diagnostics.
void parse_source(ProjectIndex& index, const std::string& src, const std::string& path);

// Loads every `.mc` file under `dir` (recursively, sorted by relative path).
ProjectIndex load_project(const std::filesystem::path& dir);

// Parses a standalone function body (used for manifest-embedded harnesses).
// The function is not added to the index but draws site ids from it.
std::shared_ptr<FunctionDef> parse_harness(ProjectIndex& index, const std::string& src,
                                           const std::string& pseudo_file);

} // namespace soup
