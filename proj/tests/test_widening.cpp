#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "soup/widening.hpp"
#include "support/testutil.hpp"

using namespace soup;
using namespace soup::testing;

TEST_CASE("level 0 covers the entry file only, with bounds of one") {
    ProjectIndex idx = load_fixture("twofile_budget");
    UnitProof p = init_proof(idx, "top", DomainConfig{});
    CHECK(p.scope.entry == "top");
    CHECK(p.scope.entry_file == "a.mc");
    CHECK(p.scope.files == std::set<std::string>{"a.mc"});
    CHECK(p.scope.functions == std::set<std::string>{"top"});
    CHECK(p.bounds.default_bound == 1);
    CHECK(p.bounds.bounds.empty());
    // mid is called but out of scope, so it is modeled
    CHECK(p.env.function_models.count("mid") == 1);
}

TEST_CASE("widening pulls in one file level at a time") {
    ProjectIndex idx = load_fixture("twofile_budget");
    UnitProof p = init_proof(idx, "top", DomainConfig{});

    REQUIRE(widen_by_one_file_level(p, idx, DomainConfig{}));
    CHECK(p.scope.files == std::set<std::string>{"a.mc", "b.mc"});
    CHECK(p.scope.functions == std::set<std::string>{"mid", "top"});
    CHECK(p.env.function_models.count("mid") == 0);
    CHECK(p.env.function_models.count("leaf") == 1);

    REQUIRE(widen_by_one_file_level(p, idx, DomainConfig{}));
    CHECK(p.scope.files == std::set<std::string>{"a.mc", "b.mc", "c.mc"});
    CHECK(p.scope.functions == std::set<std::string>{"leaf", "mid", "top"});
    CHECK(p.env.function_models.empty());

    // nothing left to pull in
    CHECK_FALSE(widen_by_one_file_level(p, idx, DomainConfig{}));
}

TEST_CASE("the stage keeps the deepest scope that fits the budget") {
    ProjectIndex idx = load_fixture("twofile_budget");
    EngineOptions opts;
    opts.budget.state_budget = 5000;
    auto resolver = make_rule_resolver();
    StageLog log;
    ScopeStageResult r = run_scope_stage(idx, "top", 2, opts, *resolver, log);
    CHECK_FALSE(r.budget_insufficient);
    // level 2 (c.mc, three extra nondets) breaches 5000 states; level 1 fits
    CHECK(r.proof.scope.files == std::set<std::string>{"a.mc", "b.mc"});
    CHECK(r.report.status == VerifyStatus::Verified);
    REQUIRE(r.probes.size() == 3);
    CHECK(r.probes[0].level == 0);
    CHECK(r.probes[0].conclusive);
    CHECK(r.probes[1].conclusive);
    CHECK_FALSE(r.probes[2].conclusive);
}

TEST_CASE("d_max stops the widening early") {
    ProjectIndex idx = load_fixture("twofile_budget");
    EngineOptions opts;
    auto resolver = make_rule_resolver();
    StageLog log;
    ScopeStageResult r = run_scope_stage(idx, "top", 0, opts, *resolver, log);
    CHECK(r.proof.scope.files == std::set<std::string>{"a.mc"});
    CHECK(r.probes.size() == 1);
}

TEST_CASE("an unaffordable level 0 is flagged, keeping the level-0 proof") {
    ProjectIndex idx = load_fixture("twofile_budget");
    EngineOptions opts;
    opts.budget.state_budget = 1;
    auto resolver = make_rule_resolver();
    StageLog log;
    ScopeStageResult r = run_scope_stage(idx, "top", 2, opts, *resolver, log);
    CHECK(r.budget_insufficient);
    CHECK(r.proof.scope.files == std::set<std::string>{"a.mc"});
    CHECK(r.report.status == VerifyStatus::InconclusiveBudget);
}

TEST_CASE("within_budget tracks the report status") {
    VerificationReport r;
    r.status = VerifyStatus::Verified;
    CHECK(within_budget(r));
    r.status = VerifyStatus::ViolationsFound;
    CHECK(within_budget(r));
    r.status = VerifyStatus::InconclusiveBudget;
    CHECK_FALSE(within_budget(r));
}

TEST_CASE("widening never drops violations already exposed at level 0") {
    // the entry's own bug stays visible when the callee's file joins the scope
    ProjectIndex idx;
    parse_source(idx, "u32 helper(u32 x) {\n    return x + 1;\n}\n", "helper.mc");
    parse_source(idx,
                 "void top(i32 a) {\n"
                 "    i32 y = 10 / a;\n"
                 "    u32 z = helper(1);\n"
                 "}\n",
                 "main.mc");
    EngineOptions opts;
    auto resolver = make_rule_resolver();
    StageLog log;
    ScopeStageResult r = run_scope_stage(idx, "top", 2, opts, *resolver, log);
    CHECK(r.proof.scope.files == std::set<std::string>{"helper.mc", "main.mc"});
    CHECK(r.report.status == VerifyStatus::ViolationsFound);
    CHECK(r.report.violated("div-by-zero@main.mc:2:0"));
}
