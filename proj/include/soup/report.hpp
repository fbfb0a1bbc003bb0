#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "soup/checks.hpp"
#include "soup/proof.hpp"

namespace soup {

enum class VerifyStatus { Verified, ViolationsFound, InconclusiveBudget, Error };

const char* verify_status_name(VerifyStatus s);

// Concrete violating run: every nondet choice made, plus a short trace tail.
struct Witness {
    std::vector<std::pair<std::string, int64_t>> assignment; // label -> value
    std::vector<std::string> trace;                          // last events, oldest first
};

struct Violation {
    PropertyCheck check;
    Witness witness;
};

struct VerificationReport {
    VerifyStatus status = VerifyStatus::Error;
    std::string error_message;

    std::vector<PropertyCheck> checks; // all instrumented properties
    std::vector<Violation> violations; // first witness per violated property
    std::set<std::string> violated_ids;
    std::set<std::string> evaluated_checks; // property ids reached at least once

    std::map<std::string, std::set<int>> covered_lines; // file -> executed lines
    std::set<std::string> saturated_loops;

    uint64_t states = 0;
    double wall_ms = 0.0;

    // Integer values the entry returned to the harness across all completed
    // runs (used when enumerating a function's feasible return values).
    std::set<int64_t> entry_returns;

    size_t total_properties() const { return checks.size(); }
    size_t covered_properties() const { return evaluated_checks.size(); }
    size_t verified_properties() const;
    bool violated(const std::string& check_id) const { return violated_ids.count(check_id) > 0; }
};

// A maximal run of consecutive unexecuted statement lines within one function.
struct CoverageBlock {
    std::string file;
    std::string function;
    int start_line = 0;
    int end_line = 0;
    // Ids of property checks located inside the block.
    std::vector<std::string> check_ids;
};

// Uncovered statement blocks of the in-scope functions, ordered by
// (file, start line).
std::vector<CoverageBlock> coverage_report(const VerificationReport& report,
                                           const std::vector<const FunctionDef*>& fns);

// JSON form of a report (stable key order).
std::string report_to_json(const VerificationReport& report);

} // namespace soup
