#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "soup/diag.hpp"
#include "soup/engine.hpp"
#include "soup/harness.hpp"
#include "soup/manifest.hpp"
#include "soup/widening.hpp"
#include "support/testutil.hpp"

using namespace soup;
using namespace soup::testing;

TEST_CASE("harness text follows the parameter types exactly") {
    ProjectIndex idx = load_fixture("listing1");
    const FunctionDef* fn = idx.resolve("process_record", "main.mc");
    REQUIRE(fn != nullptr);
    HarnessResult h = synthesize_input_model(*fn, DomainConfig{});
    CHECK(h.source ==
          "void harness() {\n"
          "    size_t dst_size = nondet_size();\n"
          "    assume(dst_size >= 1);\n"
          "    assume(dst_size <= 16);\n"
          "    u8* dst = malloc(dst_size);\n"
          "    assume(dst != NULL);\n"
          "    size_t n = nondet_size();\n"
          "    process_record(dst, n);\n"
          "}\n");
    REQUIRE(h.inputs.size() == 2);
    CHECK(initspec_to_text(h.inputs[0]) == "alloc u8 size nondet 1 16 as dst_size");
    CHECK(initspec_to_text(h.inputs[1]) == "nondet size_t");
}

TEST_CASE("the allocation range comes from the domain config") {
    ProjectIndex idx = parse_one("void f(u32* p) {\n    u32 x = p[0];\n}\n");
    DomainConfig d;
    d.alloc_cap = 4;
    HarnessResult h = synthesize_input_model(*idx.functions.at(0), d);
    CHECK(h.source.find("assume(p_size <= 4);") != std::string::npos);
    CHECK(initspec_to_text(h.inputs[0]) == "alloc u32 size nondet 1 4 as p_size");
}

TEST_CASE("scalar-only entries get plain nondet locals") {
    ProjectIndex idx = parse_one("i32 f(u8 a, i32 b, size_t c) {\n    return b;\n}\n");
    HarnessResult h = synthesize_input_model(*idx.functions.at(0), DomainConfig{});
    CHECK(h.source ==
          "void harness() {\n"
          "    u8 a = nondet_u8();\n"
          "    i32 b = nondet_i32();\n"
          "    size_t c = nondet_size();\n"
          "    f(a, b, c);\n"
          "}\n");
}

TEST_CASE("the synthesized harness parses and drives the entry") {
    ProjectIndex idx = load_fixture("listing1");
    UnitProof p = init_proof(idx, "process_record", DomainConfig{});
    // with the initial loop bound of 1 the bad iteration is still cut off
    VerificationReport r = verify(p, idx, EngineOptions{});
    CHECK(r.status == VerifyStatus::Verified);
    CHECK(r.saturated_loops == std::set<std::string>{"process_record.0"});
    // raising the bound through the same harness exposes it
    p.bounds.bounds["process_record.0"] = 11;
    VerificationReport r2 = verify(p, idx, EngineOptions{});
    CHECK(r2.status == VerifyStatus::ViolationsFound);
    CHECK(r2.violated("oob-pointer-deref@main.mc:10:0"));
}

TEST_CASE("out-of-scope callees with known signatures get type-1 models") {
    ProjectIndex idx = load_fixture("listing1");
    UnitProof p = init_proof(idx, "process_record", DomainConfig{});
    // get_record_count lives in records.mc, outside the level-0 scope
    REQUIRE(p.env.function_models.count("get_record_count") == 1);
    const FunctionModel& m = p.env.function_models.at("get_record_count");
    CHECK(m.ret.type.base == Base::Size);
    CHECK_FALSE(m.ret.type.ptr);
    CHECK(m.havoc_params.empty());
    CHECK(m.type(p.env.preconditions) == 1);
}

TEST_CASE("pointer-returning callees are modeled as fresh allocations") {
    ProjectIndex idx;
    parse_source(idx, "u8* grab(size_t n) {\n    return malloc(n);\n}\n", "ext/grab.mc");
    parse_source(idx, "void f() {\n    u8* p = grab(4);\n    if (p != NULL) {\n        p[0] = 1;\n    }\n}\n",
                 "main.mc");
    VerificationScope scope;
    scope.entry = "process";
    scope.entry_file = "main.mc";
    scope.files = {"main.mc"};
    scope.functions = {"f"};
    auto models = model_external_callees(scope, idx, DomainConfig{});
    REQUIRE(models.count("grab") == 1);
    CHECK(models.at("grab").ret.type.ptr);
    CHECK(models.at("grab").ret.size_lo >= 0);
}

TEST_CASE("callees without any known signature are an input error") {
    ProjectIndex idx;
    parse_source(idx, "void f() {\n    mystery();\n}\n", "main.mc");
    VerificationScope scope;
    scope.entry = "f";
    scope.entry_file = "main.mc";
    scope.files = {"main.mc"};
    scope.functions = {"f"};
    try {
        model_external_callees(scope, idx, DomainConfig{});
        FAIL("expected an input error");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("mystery") != std::string::npos);
    }
}

TEST_CASE("intrinsics never get models") {
    ProjectIndex idx = load_fixture("listing1");
    UnitProof p = init_proof(idx, "handle_record", DomainConfig{});
    CHECK(p.env.function_models.count("malloc") == 0);
    CHECK(p.env.function_models.count("free") == 0);
    CHECK(p.env.function_models.count("nondet_size") == 0);
}
