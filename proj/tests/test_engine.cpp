#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "soup/engine.hpp"
#include "soup/widening.hpp"
#include "support/testutil.hpp"

using namespace soup;
using namespace soup::testing;

namespace {

struct Run {
    ProjectIndex idx;
    UnitProof proof;
    VerificationReport report;
};

Run run_entry(const std::string& src, const std::string& entry,
              EngineOptions opts = {},
              DomainConfig domains = {}) {
    Run r;
    parse_source(r.idx, src, "t.mc");
    r.proof = init_proof(r.idx, entry, domains);
    opts.domains = domains;
    r.report = verify(r.proof, r.idx, opts);
    return r;
}

} // namespace

TEST_CASE("safe straight-line code verifies in one state") {
    Run r = run_entry(R"(
void f() {
    u8 buf[4];
    buf[3] = 9;
    u8 x = buf[3];
}
)", "f");
    CHECK(r.report.status == VerifyStatus::Verified);
    CHECK(r.report.states == 1);
    CHECK(r.report.violated_ids.empty());
    CHECK(r.report.verified_properties() == r.report.covered_properties());
}

TEST_CASE("loops beyond their bound become assumptions, not violations") {
    const char* src = R"(
void f() {
    u8 buf[3];
    size_t i = 0;
    while (i < 10) {
        buf[i] = 1;
        i = i + 1;
    }
}
)";
    SUBCASE("a small bound hides the later out-of-bounds write") {
        EngineOptions o;
        ProjectIndex idx;
        parse_source(idx, src, "t.mc");
        UnitProof p = init_proof(idx, "f", DomainConfig{});
        p.bounds.bounds["f.0"] = 2;
        VerificationReport rep = verify(p, idx, o);
        CHECK(rep.status == VerifyStatus::Verified);
        CHECK(rep.saturated_loops == std::set<std::string>{"f.0"});
    }
    SUBCASE("a bound reaching the bad iteration exposes it") {
        EngineOptions o;
        ProjectIndex idx;
        parse_source(idx, src, "t.mc");
        UnitProof p = init_proof(idx, "f", DomainConfig{});
        p.bounds.bounds["f.0"] = 5;
        VerificationReport rep = verify(p, idx, o);
        CHECK(rep.status == VerifyStatus::ViolationsFound);
        CHECK(rep.violated("array-upper-bound@t.mc:6:0"));
    }
}

TEST_CASE("state budget exhaustion is reported as inconclusive") {
    EngineOptions o;
    o.budget.state_budget = 3;
    Run r = run_entry(R"(
void f(u8 a, u8 b) {
    u8 x = a + b;
}
)", "f", o);
    CHECK(r.report.status == VerifyStatus::InconclusiveBudget);
    CHECK(r.report.states <= 3);
}

TEST_CASE("free(NULL) is a no-op") {
    Run r = run_entry(R"(
void f() {
    u8* p = NULL;
    free(p);
}
)", "f");
    CHECK(r.report.status == VerifyStatus::Verified);
}

TEST_CASE("dereferencing an uninitialized pointer is an invalid deref") {
    Run r = run_entry(R"(
void f() {
    u8* p;
    p[0] = 1;
}
)", "f");
    CHECK(r.report.status == VerifyStatus::ViolationsFound);
    CHECK(r.report.violated("invalid-deref@t.mc:4:0"));
}

TEST_CASE("pointers to expired stack frames trip dead-object-deref") {
    Run r = run_entry(R"(
u8* make() {
    u8 buf[4];
    buf[0] = 1;
    return buf;
}
void use() {
    u8* p = make();
    u8 x = p[0];
}
)", "use");
    CHECK(r.report.status == VerifyStatus::ViolationsFound);
    CHECK(r.report.violated("dead-object-deref@t.mc:9:0"));
}

TEST_CASE("integer returns from the entry are collected across runs") {
    Run r = run_entry(R"(
i32 f(u8 x) {
    if (x > 3) {
        return 7;
    }
    return 1;
}
)", "f");
    CHECK(r.report.status == VerifyStatus::Verified);
    CHECK(r.report.entry_returns == std::set<int64_t>{1, 7});
}

TEST_CASE("violations carry a concrete witness") {
    Run r = run_entry(R"(
void f(u8 x) {
    u8 buf[4];
    assume(x < 16);
    buf[x] = 1;
}
)", "f");
    REQUIRE(r.report.status == VerifyStatus::ViolationsFound);
    REQUIRE(r.report.violations.size() == 1);
    const Witness& w = r.report.violations[0].witness;
    REQUIRE_FALSE(w.assignment.empty());
    // the nondet choice for x must pick an out-of-range index
    CHECK(w.assignment[0].second >= 4);
    CHECK_FALSE(w.trace.empty());
}

TEST_CASE("uncovered statements show up as coverage blocks") {
    Run r = run_entry(R"(
config GUARD = 0;
void f() {
    u8 x = 0;
    if (GUARD == 1) {
        u8 buf[2];
        buf[5] = 1;
        x = 9;
    }
}
)", "f");
    CHECK(r.report.status == VerifyStatus::Verified);
    auto fns = scope_functions(r.proof, r.idx);
    auto blocks = coverage_report(r.report, fns);
    REQUIRE(blocks.size() == 1);
    CHECK(blocks[0].function == "f");
    CHECK(blocks[0].start_line == 6);
    CHECK(blocks[0].end_line == 8);
    REQUIRE(blocks[0].check_ids.size() == 2);
    // checks inside the block stay uncovered, not verified
    CHECK(r.report.evaluated_checks.count("array-upper-bound@t.mc:7:0") == 0);
}

TEST_CASE("lazy heap cells are enumerated only when read") {
    Run r = run_entry(R"(
u8 pick(u8* data) {
    if (data[0] > 2) {
        return data[1];
    }
    return 0;
}
)", "pick", {}, DomainConfig{7, 15, 4});
    CHECK(r.report.status == VerifyStatus::Verified);
    // data[1] is only read on the data[0] > 2 branch; runs on the other
    // branch never fork on it. With u8 domain 0..7: 8 sizes x first cell,
    // second cell forked only for 5 of 8 first-cell values.
    CHECK(r.report.states < 8 * 8 * 8);
}

TEST_CASE("report JSON includes status, violations and coverage") {
    Run r = run_entry(R"(
void f(i32 a) {
    i32 x = a / 0;
}
)", "f");
    std::string js = report_to_json(r.report);
    CHECK(js.find("\"status\": \"violations-found\"") != std::string::npos);
    CHECK(js.find("div-by-zero@t.mc:3:0") != std::string::npos);
    CHECK(js.find("\"states\"") != std::string::npos);
}
