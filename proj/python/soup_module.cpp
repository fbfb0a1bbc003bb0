#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "soup/checks.hpp"
#include "soup/engine.hpp"
#include "soup/manifest.hpp"
#include "soup/parser.hpp"
#include "soup/pipeline.hpp"
#include "soup/report.hpp"

namespace py = pybind11;

namespace {

py::dict generate(const std::string& project_dir, const std::string& entry,
                  const std::string& out_dir, int scope_depth, double time_budget,
                  uint64_t state_budget, int64_t domain_cap) {
    soup::GenerateOptions opts;
    opts.project_dir = project_dir;
    opts.entry = entry;
    opts.out_dir = out_dir;
    opts.scope_depth = scope_depth;
    opts.time_budget_sec = time_budget;
    opts.state_budget = state_budget;
    opts.domain_cap = domain_cap;
    std::ostringstream out, err;
    int code = soup::run_generate(opts, out, err);
    py::dict d;
    d["exit_code"] = code;
    d["stdout"] = out.str();
    d["stderr"] = err.str();
    return d;
}

py::dict verify(const std::string& project_dir, const std::string& proof_path) {
    std::ostringstream out, err;
    int code = soup::run_verify(project_dir, proof_path, out, err);
    py::dict d;
    d["exit_code"] = code;
    d["report_json"] = out.str();
    d["stderr"] = err.str();
    return d;
}

py::dict expose(const std::string& errors_path, const std::string& sink) {
    std::ostringstream out, err;
    int code = soup::run_expose(errors_path, sink, out, err);
    py::dict d;
    d["exit_code"] = code;
    d["verdict_json"] = out.str();
    d["stderr"] = err.str();
    return d;
}

std::string manifest_roundtrip(const std::string& text) {
    return soup::serialize_manifest(soup::parse_manifest(text));
}

std::vector<std::string> check_kinds() {
    std::vector<std::string> out;
    for (int k = 0; k < soup::kCoreCheckKinds; ++k)
        out.push_back(soup::check_kind_name(static_cast<soup::CheckKind>(k)));
    return out;
}

} // namespace

PYBIND11_MODULE(soupgen_core, m) {
    m.doc() = "bounded memory-safety verification with generated unit proofs";
    m.def("generate", &generate, py::arg("project_dir"), py::arg("entry"),
          py::arg("out_dir") = "soup-out", py::arg("scope_depth") = 0,
          py::arg("time_budget") = 60.0, py::arg("state_budget") = 2000000,
          py::arg("domain_cap") = 0,
          "Run the three-stage proof pipeline; returns exit code and captured output.");
    m.def("verify", &verify, py::arg("project_dir"), py::arg("proof_path"),
          "Re-verify a stored proof; returns the JSON report.");
    m.def("expose", &expose, py::arg("errors_path"), py::arg("sink"),
          "Look a FILE:LINE:KIND sink up in a stored errors.json.");
    m.def("manifest_roundtrip", &manifest_roundtrip, py::arg("text"),
          "Parse manifest text and serialize it back (normalizes formatting).");
    m.def("check_kinds", &check_kinds, "Names of the tracked property kinds.");
    m.attr("EXIT_OK") = soup::kExitOk;
    m.attr("EXIT_BUDGET") = soup::kExitBudget;
    m.attr("EXIT_INPUT") = soup::kExitInput;
}
