#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

namespace soup {

// Exit codes shared by all subcommands.
constexpr int kExitOk = 0;
constexpr int kExitBudget = 2; // resource budget insufficient for any scope
constexpr int kExitInput = 3; // bad input (missing entry, parse error, ...)

struct GenerateOptions {
    std::string project_dir;
    std::string entry;
    int scope_depth = 0;
    double time_budget_sec = 60.0;
    uint64_t state_budget = 2'000'000;
    int64_t domain_cap = 0; // 0 = defaults
    std::string resolver = "rule"; // "rule" | "remote"
    std::string endpoint;
    std::string out_dir = "soup-out";
};

// Runs the three stages, writing stage1.proof / stage2.proof / stage3.proof,
// errors.json, metrics.json and stage_log.json into the output directory.
int run_generate(const GenerateOptions& opts, std::ostream& out, std::ostream& err);

// Re-verifies a stored proof against the project; prints the JSON report.
int run_verify(const std::string& project_dir, const std::string& proof_path,
               std::ostream& out, std::ostream& err);

// Looks a sink up in a stored errors.json: exposed, linked or unexploitable.
int run_expose(const std::string& errors_path, const std::string& sink,
               std::ostream& out, std::ostream& err);

} // namespace soup
