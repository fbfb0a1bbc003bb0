#include "soup/report.hpp"

#include <json.hpp>

namespace soup {

using json = nlohmann::ordered_json;

const char* verify_status_name(VerifyStatus s) {
    switch (s) {
        case VerifyStatus::Verified: return "verified";
        case VerifyStatus::ViolationsFound: return "violations-found";
        case VerifyStatus::InconclusiveBudget: return "inconclusive-budget";
        case VerifyStatus::Error: return "error";
    }
    return "?";
}

size_t VerificationReport::verified_properties() const {
    size_t n = 0;
    for (const auto& id : evaluated_checks)
        if (!violated_ids.count(id)) ++n;
    return n;
}

std::vector<CoverageBlock> coverage_report(const VerificationReport& report,
                                           const std::vector<const FunctionDef*>& fns) {
    std::vector<CoverageBlock> out;
    for (const FunctionDef* fn : fns) {
        auto cov = report.covered_lines.find(fn->file);
        const std::set<int>* covered = cov == report.covered_lines.end() ? nullptr : &cov->second;
        CoverageBlock cur;
        bool open = false;
        auto flush = [&]() {
            if (!open) return;
            for (const auto& c : report.checks)
                if (c.file == cur.file && c.line >= cur.start_line && c.line <= cur.end_line)
                    cur.check_ids.push_back(c.id());
            out.push_back(cur);
            cur = CoverageBlock{};
            open = false;
        };
        for (int line : fn->stmt_lines) {
            bool hit = covered && covered->count(line);
            if (hit) {
                flush();
                continue;
            }
            if (open && line == cur.end_line + 1) {
                cur.end_line = line;
                continue;
            }
            // Lines in stmt_lines are not always contiguous; extend a block
            // across gaps that contain no executable statement.
            if (open) {
                bool executable_between = false;
                for (int l = cur.end_line + 1; l < line; ++l)
                    executable_between = executable_between || fn->stmt_lines.count(l);
                if (!executable_between) {
                    cur.end_line = line;
                    continue;
                }
                flush();
            }
            cur.file = fn->file;
            cur.function = fn->name;
            cur.start_line = line;
            cur.end_line = line;
            open = true;
        }
        flush();
    }
    std::sort(out.begin(), out.end(), [](const CoverageBlock& a, const CoverageBlock& b) {
        return std::tie(a.file, a.start_line) < std::tie(b.file, b.start_line);
    });
    return out;
}

std::string report_to_json(const VerificationReport& report) {
    json j;
    j["schema-version"] = 1;
    j["status"] = verify_status_name(report.status);
    if (!report.error_message.empty()) j["error"] = report.error_message;
    j["totals"] = {
        {"total_properties", report.total_properties()},
        {"covered_properties", report.covered_properties()},
        {"verified_properties", report.verified_properties()},
        {"violated_properties", report.violated_ids.size()},
    };
    j["resources"] = {
        {"states", report.states},
        {"wall_ms", report.wall_ms},
    };
    json props = json::array();
    for (const auto& c : report.checks) {
        json p;
        p["id"] = c.id();
        p["kind"] = check_kind_name(c.kind);
        p["file"] = c.file;
        p["line"] = c.line;
        p["function"] = c.function;
        p["guard"] = c.guard;
        std::string cid = c.id();
        p["result"] = report.violated(cid)               ? "violated"
                      : report.evaluated_checks.count(cid) ? "verified"
                                                           : "uncovered";
        props.push_back(std::move(p));
    }
    j["properties"] = std::move(props);
    json viols = json::array();
    for (const auto& v : report.violations) {
        json w;
        w["property"] = v.check.id();
        w["guard"] = v.check.guard;
        json asg = json::array();
        for (const auto& [label, value] : v.witness.assignment)
            asg.push_back({{"choice", label}, {"value", value}});
        w["assignment"] = std::move(asg);
        w["trace"] = v.witness.trace;
        viols.push_back(std::move(w));
    }
    j["violations"] = std::move(viols);
    json cov = json::object();
    for (const auto& [file, lines] : report.covered_lines)
        cov[file] = std::vector<int>(lines.begin(), lines.end());
    j["covered_lines"] = std::move(cov);
    j["saturated_loops"] =
        std::vector<std::string>(report.saturated_loops.begin(), report.saturated_loops.end());
    return j.dump(2) + "\n";
}

} // namespace soup
