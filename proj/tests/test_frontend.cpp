#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "soup/callgraph.hpp"
#include "soup/checks.hpp"
#include "soup/diag.hpp"
#include "soup/lexer.hpp"
#include "soup/printer.hpp"
#include "soup/typecheck.hpp"
#include "support/testutil.hpp"

using namespace soup;
using namespace soup::testing;

TEST_CASE("lexer tracks positions and skips comments") {
    auto toks = lex("u32 x; // comment\n  x = 1;\n", "f.mc");
    REQUIRE(toks.size() >= 7);
    CHECK(toks[0].kind == Tok::KwU32);
    CHECK(toks[3].kind == Tok::Ident); // x on line 2
    CHECK(toks[3].line == 2);
    CHECK(toks[3].col == 3);
    CHECK(toks.back().kind == Tok::End);
}

TEST_CASE("lexer rejects stray characters with a position") {
    CHECK_THROWS_AS(lex("u32 x = $;", "f.mc"), SyntaxError);
}

static const char* kSample = R"(// sample
config LIMIT in {2, 4, 8} = 4;

u32 total = 0;

u32 sum(u32* vals, size_t n) {
    u32 acc = 0;
    for (size_t i = 0; i < n; i = i + 1) {
        acc = acc + vals[i];
    }
    size_t j = 0;
    while (j < n) {
        j = j + 1;
    }
    return acc;
}
)";

TEST_CASE("parser round-trips through the printer") {
    ProjectIndex a = parse_one(kSample, "s.mc");
    std::string printed = print_unit(a, "s.mc");
    ProjectIndex b = parse_one(printed, "s.mc");
    CHECK(print_unit(b, "s.mc") == printed);
}

TEST_CASE("loop ids and induction hints") {
    ProjectIndex idx = parse_one(kSample, "s.mc");
    const FunctionDef* fn = idx.resolve("sum", "s.mc");
    REQUIRE(fn != nullptr);
    REQUIRE(fn->loops.size() == 2);
    CHECK(fn->loops[0].id == "sum.0");
    CHECK(fn->loops[1].id == "sum.1");
    REQUIRE(fn->loops[0].induction.has_value());
    CHECK(fn->loops[0].induction->var == "i");
    CHECK(fn->loops[0].induction->init == 0);
    CHECK(fn->loops[0].induction->stride == 1);
    // while loop with init just before and increment as last statement
    REQUIRE(fn->loops[1].induction.has_value());
    CHECK(fn->loops[1].induction->var == "j");
}

TEST_CASE("config candidates and globals are indexed") {
    ProjectIndex idx = parse_one(kSample, "s.mc");
    REQUIRE(idx.configs.count("LIMIT") == 1);
    CHECK(idx.configs.at("LIMIT").value == 4);
    REQUIRE(idx.configs.at("LIMIT").candidates.has_value());
    CHECK(*idx.configs.at("LIMIT").candidates == std::vector<int64_t>{2, 4, 8});
    CHECK(idx.global("total") != nullptr);
}

TEST_CASE("syntax errors carry file, line and column") {
    try {
        parse_one("u32 f( { return 0; }", "bad.mc");
        FAIL("expected a syntax error");
    } catch (const SyntaxError& e) {
        CHECK(e.file == "bad.mc");
        CHECK(e.line == 1);
        CHECK(e.col > 1);
    }
}

TEST_CASE("typechecker promotes like C within the 32-bit types") {
    ProjectIndex idx = parse_one(R"(
i32 f(u8 a, u32 b, i32 c, size_t s) {
    i32 x = a + c;
    u32 y = b + c;
    size_t z = s + 1;
    return x;
}
)");
    FunctionDef& fn = *idx.functions.at(0);
    typecheck_function(fn, idx, {});
    // a + c: u8 promotes, result i32; b + c: unsigned wins
    const Stmt& s0 = *fn.body[0];
    CHECK(s0.decl.init->type.base == Base::I32);
    const Stmt& s1 = *fn.body[1];
    CHECK(s1.decl.init->type.base == Base::U32);
    const Stmt& s2 = *fn.body[2];
    CHECK(s2.decl.init->type.base == Base::Size);
}

TEST_CASE("typechecker rejects unknown callees and bad assignments") {
    ProjectIndex a = parse_one("void f() { ghost(); }");
    CHECK_THROWS_AS(typecheck_function(*a.functions.at(0), a, {}), SyntaxError);

    ProjectIndex b = parse_one("void f(u8* p) { u32 x = 0; x = p; }");
    CHECK_THROWS_AS(typecheck_function(*b.functions.at(0), b, {}), SyntaxError);
}

TEST_CASE("call graph resolves ambiguous names toward the caller's file") {
    ProjectIndex idx;
    parse_source(idx, "u32 helper() { return 1; }\nu32 go() { return helper(); }", "a/m.mc");
    parse_source(idx, "u32 helper() { return 2; }", "b/m.mc");
    const FunctionDef* h = idx.resolve("helper", "a/m.mc");
    REQUIRE(h != nullptr);
    CHECK(h->file == "a/m.mc");
    auto reach = reachable_within(idx, "go", "a/m.mc", {"a/m.mc", "b/m.mc"});
    CHECK(reach == std::set<std::string>{"go", "helper"});
}

TEST_CASE("reachability stays inside the given file set") {
    ProjectIndex idx = load_fixture("twofile_budget");
    auto level0 = reachable_within(idx, "top", "a.mc", {"a.mc"});
    CHECK(level0 == std::set<std::string>{"top"});
    auto level1 = reachable_within(idx, "top", "a.mc", {"a.mc", "b.mc"});
    CHECK(level1 == std::set<std::string>{"mid", "top"});
}

TEST_CASE("instrumentation emits the documented check ids") {
    ProjectIndex idx = parse_one(R"(
void f(u8* p, i32 a, i32 b) {
    p[0] = 1;
    i32 x = a + b;
    i32 y = a / b;
    free(p);
}
)", "m.mc");
    typecheck_function(*idx.functions.at(0), idx, {});
    Instrumentation ins = instrument({idx.functions.at(0).get()});
    std::set<std::string> ids;
    for (const auto& c : ins.checks) ids.insert(c.id());
    // pointer access: the five deref properties
    CHECK(ids.count("null-deref@m.mc:3:0") == 1);
    CHECK(ids.count("invalid-deref@m.mc:3:0") == 1);
    CHECK(ids.count("deallocated-deref@m.mc:3:0") == 1);
    CHECK(ids.count("dead-object-deref@m.mc:3:0") == 1);
    CHECK(ids.count("oob-pointer-deref@m.mc:3:0") == 1);
    CHECK(ids.count("signed-overflow-add@m.mc:4:0") == 1);
    CHECK(ids.count("div-by-zero@m.mc:5:0") == 1);
    CHECK(ids.count("free-offset-zero@m.mc:6:0") == 1);
    CHECK(ids.count("free-dynamic@m.mc:6:0") == 1);
    CHECK(ids.count("double-free@m.mc:6:0") == 1);
}

TEST_CASE("two checks of one kind on one line get distinct ordinals") {
    ProjectIndex idx = parse_one("i32 f(i32 a, i32 b) { return (a / 2) + (b / 2); }", "m.mc");
    typecheck_function(*idx.functions.at(0), idx, {});
    Instrumentation ins = instrument({idx.functions.at(0).get()});
    int div = 0;
    for (const auto& c : ins.checks)
        if (c.kind == CheckKind::DivByZero) {
            CHECK(c.ordinal == div);
            ++div;
        }
    CHECK(div == 2);
}
