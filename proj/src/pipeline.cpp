#include "soup/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "soup/agent.hpp"
#include "soup/diag.hpp"
#include "soup/engine.hpp"
#include "soup/envref.hpp"
#include "soup/gaps.hpp"
#include "soup/manifest.hpp"
#include "soup/parser.hpp"
#include "soup/widening.hpp"

namespace soup {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot write " + path.string());
    f << content;
}

std::string read_file(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw InputError("cannot read " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

json stage_snapshot(const std::string& name, const UnitProof& proof,
                    const VerificationReport& report, size_t reported_errors,
                    double wall_ms) {
    json s;
    s["stage"] = name;
    s["status"] = verify_status_name(report.status);
    s["proof-size-lines"] = proof.size_lines();
    s["functions-in-scope"] = proof.scope.functions.size();
    s["scope-level"] = proof.scope.level;
    s["custom-loop-bounds"] = proof.bounds.bounds.size();
    s["preconditions"] = proof.env.preconditions.size();
    s["function-models"] = proof.env.function_models.size();
    s["total-properties"] = report.total_properties();
    s["covered-properties"] = report.covered_properties();
    s["verified-properties"] = report.verified_properties();
    s["violated-properties"] = report.violated_ids.size();
    s["reported-errors"] = reported_errors;
    s["states"] = report.states;
    s["wall-ms"] = wall_ms;
    return s;
}

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

} // namespace

int run_generate(const GenerateOptions& opts, std::ostream& out, std::ostream& err) {
    ProjectIndex index;
    try {
        index = load_project(opts.project_dir);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    }
    const auto* cands = index.candidates(opts.entry);
    if (!cands || cands->empty()) {
        err << "error: entry function '" << opts.entry << "' not found in "
            << opts.project_dir << "\n";
        return kExitInput;
    }

    EngineOptions eopts;
    if (opts.domain_cap > 0) eopts.domains = domains_with_cap(opts.domain_cap);
    eopts.budget.time_budget_sec = opts.time_budget_sec;
    eopts.budget.state_budget = opts.state_budget;

    std::unique_ptr<Resolver> resolver;
    if (opts.resolver == "rule") {
        resolver = make_rule_resolver();
    } else if (opts.resolver == "remote") {
        if (opts.endpoint.empty()) {
            err << "error: --resolver remote requires --endpoint\n";
            return kExitInput;
        }
        RemoteConfig rc;
        rc.endpoint = opts.endpoint;
        resolver = make_remote_resolver(rc);
    } else {
        err << "error: unknown resolver '" << opts.resolver << "'\n";
        return kExitInput;
    }

    fs::path out_dir(opts.out_dir);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        err << "error: cannot create " << out_dir.string() << ": " << ec.message() << "\n";
        return kExitInput;
    }

    StageLog log;
    json metrics;
    metrics["schema-version"] = 1;
    metrics["entry"] = opts.entry;
    metrics["stages"] = json::array();
    auto t_all = std::chrono::steady_clock::now();

    try {
        // Stage 1: resource-aware scope selection.
        auto t1 = std::chrono::steady_clock::now();
        ScopeStageResult s1 =
            run_scope_stage(index, opts.entry, opts.scope_depth, eopts, *resolver, log);
        double ms1 = ms_since(t1);
        write_file(out_dir / "stage1.proof", serialize_manifest(s1.proof));
        metrics["stages"].push_back(stage_snapshot("scope", s1.proof, s1.report, 0, ms1));
        if (s1.budget_insufficient) {
            write_file(out_dir / "stage_log.json", log.to_json());
            write_file(out_dir / "metrics.json", metrics.dump(2) + "\n");
            err << "error: resource budget insufficient for the smallest scope of '"
                << opts.entry << "'\n";
            return kExitBudget;
        }
        out << "stage 1: scope level " << s1.proof.scope.level << ", "
            << s1.proof.scope.functions.size() << " function(s), "
            << verify_status_name(s1.report.status) << "\n";

        // Stage 2: property-guided bound refinement.
        auto t2 = std::chrono::steady_clock::now();
        BoundStageResult s2 = run_bound_stage(s1.proof, index, eopts, *resolver, log);
        double ms2 = ms_since(t2);
        write_file(out_dir / "stage2.proof", serialize_manifest(s2.proof));
        metrics["stages"].push_back(stage_snapshot("bounds", s2.proof, s2.report, 0, ms2));
        out << "stage 2: " << s2.proof.bounds.bounds.size() << " custom loop bound(s), "
            << s2.report.covered_properties() << "/" << s2.report.total_properties()
            << " properties covered\n";

        // Stage 3: context-aware environment refinement.
        auto t3 = std::chrono::steady_clock::now();
        EnvStageResult s3 = run_env_stage(s2.proof, index, eopts, *resolver, log);
        double ms3 = ms_since(t3);
        write_file(out_dir / "stage3.proof", serialize_manifest(s3.proof));
        write_file(out_dir / "errors.json", errors_to_json(s3));
        metrics["stages"].push_back(
            stage_snapshot("env", s3.proof, s3.report, s3.errors.size(), ms3));
        metrics["total-wall-ms"] = ms_since(t_all);
        write_file(out_dir / "metrics.json", metrics.dump(2) + "\n");
        write_file(out_dir / "stage_log.json", log.to_json());

        out << "stage 3: " << s3.proof.env.preconditions.size() << " precondition(s), "
            << s3.errors.size() << " reported error(s), "
            << verify_status_name(s3.report.status) << "\n";
        out << "result: " << verify_status_name(s3.report.status) << ", "
            << s3.report.verified_properties() << "/" << s3.report.total_properties()
            << " properties verified\n";
        if (s3.report.status == VerifyStatus::Error) {
            err << "error: " << s3.report.error_message << "\n";
            return kExitInput;
        }
        return kExitOk;
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    }
}

int run_verify(const std::string& project_dir, const std::string& proof_path,
               std::ostream& out, std::ostream& err) {
    try {
        ProjectIndex index = load_project(project_dir);
        UnitProof proof = parse_manifest(read_file(proof_path));
        EngineOptions eopts;
        VerificationReport report = verify(proof, index, eopts);
        out << report_to_json(report);
        if (report.status == VerifyStatus::Error) {
            err << "error: " << report.error_message << "\n";
            return kExitInput;
        }
        return kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    }
}

int run_expose(const std::string& errors_path, const std::string& sink,
               std::ostream& out, std::ostream& err) {
    // sink: FILE:LINE:KIND
    size_t p2 = sink.rfind(':');
    size_t p1 = p2 == std::string::npos ? std::string::npos : sink.rfind(':', p2 - 1);
    if (p1 == std::string::npos || p2 == std::string::npos || p1 == 0 || p2 <= p1 + 1) {
        err << "error: sink must have the form FILE:LINE:KIND\n";
        return kExitInput;
    }
    std::string file = sink.substr(0, p1);
    std::string kind = sink.substr(p2 + 1);
    int line = 0;
    try {
        line = std::stoi(sink.substr(p1 + 1, p2 - p1 - 1));
        check_kind_from_name(kind);
    } catch (const std::exception&) {
        err << "error: sink must have the form FILE:LINE:KIND with a known kind\n";
        return kExitInput;
    }

    json doc;
    try {
        doc = json::parse(read_file(errors_path));
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    }

    std::string id_prefix = kind + "@" + file + ":" + std::to_string(line) + ":";
    json verdict;
    verdict["sink"] = sink;
    verdict["verdict"] = "unknown";

    for (const auto& e : doc.value("errors", json::array())) {
        if (e.value("file", "") == file && e.value("line", -1) == line &&
            e.value("kind", "") == kind) {
            verdict["verdict"] = "exposed";
            verdict["error"] = e.value("property", "");
            verdict["witness"] = e.value("witness", json::object());
            verdict["contexts"] = e.value("contexts", json::array());
            out << verdict.dump(2) << "\n";
            return kExitOk;
        }
    }
    for (const auto& e : doc.value("errors", json::array())) {
        for (const auto& s : e.value("linked-sinks", json::array())) {
            if (s.is_string() && s.get<std::string>().rfind(id_prefix, 0) == 0) {
                verdict["verdict"] = "linked";
                verdict["error"] = e.value("property", "");
                verdict["linked-through"] = e.value("rejected-precondition", json());
                out << verdict.dump(2) << "\n";
                return kExitOk;
            }
        }
    }
    for (const auto& s : doc.value("suppressed", json::array())) {
        std::string prop = s.value("property", "");
        if (prop.rfind(id_prefix, 0) == 0) {
            verdict["verdict"] = "unexploitable";
            verdict["suppressed-by"] = s.value("precondition", "");
            verdict["validated"] = s.value("validated", false);
            out << verdict.dump(2) << "\n";
            return kExitOk;
        }
    }
    out << verdict.dump(2) << "\n";
    return kExitOk;
}

} // namespace soup
