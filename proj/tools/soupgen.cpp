#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "soup/pipeline.hpp"

int main(int argc, char** argv) {
    CLI::App app{"bounded memory-safety verification with generated unit proofs"};
    app.require_subcommand(1);

    soup::GenerateOptions gen;
    auto* cmd_gen = app.add_subcommand("generate", "generate and refine a unit proof");
    cmd_gen->add_option("--project", gen.project_dir, "project source directory")->required();
    cmd_gen->add_option("--entry", gen.entry, "entry function name")->required();
    cmd_gen->add_option("--scope-depth", gen.scope_depth, "maximum scope widening level");
    cmd_gen->add_option("--time-budget", gen.time_budget_sec, "per-verification seconds");
    cmd_gen->add_option("--state-budget", gen.state_budget, "per-verification state cap");
    cmd_gen->add_option("--domain-cap", gen.domain_cap, "cap nondet value ranges at N");
    cmd_gen->add_option("--resolver", gen.resolver, "semantic task resolver: rule | remote");
    cmd_gen->add_option("--endpoint", gen.endpoint, "remote resolver base URL");
    cmd_gen->add_option("--out", gen.out_dir, "output directory");

    std::string project_dir, proof_path;
    auto* cmd_verify = app.add_subcommand("verify", "re-verify a stored proof");
    cmd_verify->add_option("--project", project_dir, "project source directory")->required();
    cmd_verify->add_option("--proof", proof_path, "proof manifest path")->required();

    std::string errors_path, sink;
    auto* cmd_expose = app.add_subcommand("expose", "look a sink up in a stored error report");
    cmd_expose->add_option("--errors", errors_path, "errors.json path")->required();
    cmd_expose->add_option("--sink", sink, "sink as FILE:LINE:KIND")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? soup::kExitOk : soup::kExitInput;
    }

    if (cmd_gen->parsed()) return soup::run_generate(gen, std::cout, std::cerr);
    if (cmd_verify->parsed())
        return soup::run_verify(project_dir, proof_path, std::cout, std::cerr);
    return soup::run_expose(errors_path, sink, std::cout, std::cerr);
}
