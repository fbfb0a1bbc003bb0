#pragma once

#include <map>
#include <string>
#include <vector>

#include "soup/ast.hpp"

namespace soup {

// The memory-safety property kinds tracked by the engine, plus user-written
// asserts (`UserAssert`, reported like any other property but not part of the
// core kind set).
enum class CheckKind {
    NullDeref,
    InvalidDeref,
    DeallocatedDeref,
    DeadObjectDeref,
    OobPointerDeref,
    ArrayLowerBound,
    ArrayUpperBound,
    SignedOverflowAdd,
    SignedOverflowSub,
    SignedOverflowMul,
    ShiftDistanceNegative,
    ShiftDistanceTooLarge,
    DivByZero,
    MemcpySrcReadable,
    MemcpyDstWriteable,
    MemcpyOverlap,
    MemsetDstWriteable,
    FreeOffsetZero,
    FreeDynamic,
    DoubleFree,
    UserAssert,
};

constexpr int kCoreCheckKinds = 20;

const char* check_kind_name(CheckKind k);
// Parses a kind name; throws InputError on unknown names.
CheckKind check_kind_from_name(const std::string& name);

struct PropertyCheck {
    CheckKind kind = CheckKind::NullDeref;
    std::string file;
    int line = 0;
    int ordinal = 0; // n-th check of this kind on this line, zero-based
    std::string function;
    // Guard condition in human-readable form, e.g. "i < size_of(dst)".
    std::string guard;

    std::string id() const;
};

// Instrumentation result: the checks of a set of functions, in deterministic
// site order, plus a site-id index used by the evaluator.
struct Instrumentation {
    std::vector<PropertyCheck> checks;
    // AST site id -> indices into `checks` (a site can carry several kinds).
    std::map<int, std::vector<int>> by_site;

    // Index of the check with `kind` at `site`, or -1.
    int find(int site, CheckKind kind) const;
};

// Collects the property checks of `fns` (already in deterministic order).
Instrumentation instrument(const std::vector<const FunctionDef*>& fns);

} // namespace soup
