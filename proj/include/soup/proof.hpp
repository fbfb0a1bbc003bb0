#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "soup/ast.hpp"

namespace soup {

// ---------------------------------------------------------------------------
// Verification scope
// ---------------------------------------------------------------------------

struct VerificationScope {
    std::string entry;
    std::string entry_file;
    std::set<std::string> functions; // includes the entry
    std::set<std::string> files;
    int level = 0; // widening level this scope was produced at
};

// ---------------------------------------------------------------------------
// Loop bounds
// ---------------------------------------------------------------------------

struct LoopBoundMap {
    int default_bound = 1;
    std::map<std::string, int> bounds; // loop id -> bound (>= 1)

    int bound_of(const std::string& loop_id) const {
        auto it = bounds.find(loop_id);
        return it == bounds.end() ? default_bound : it->second;
    }
};

// ---------------------------------------------------------------------------
// Environment model
// ---------------------------------------------------------------------------

// How one entry parameter (or a model's return value) is initialized.
struct InitSpec {
    std::string param; // empty for model returns
    TypeRef type;
    // For pointers: the pointee allocation.
    bool size_fixed = false;
    int64_t size_lo = 1, size_hi = 16; // nondet range, or fixed value in size_lo
    std::string size_symbol;           // name the size is exposed under, "" = none
    bool assume_not_null = true;
};

enum class PreCat { PointerNotNull, VariableConstant, VariableVariable, PointerOffset };

const char* precat_name(PreCat c);
PreCat precat_from_name(const std::string& name);

enum class Rel { Lt, Le, Gt, Ge, Eq, Ne };

const char* rel_name(Rel r);
Rel rel_from_name(const std::string& name);

// One precondition over harness-visible symbols.  Subjects are entry parameter
// names, exposed size symbols (e.g. "dst_size"), or "ret_of(<function>)" for
// the return value of a modeled callee.
struct PreconditionTerm {
    PreCat category = PreCat::VariableConstant;
    std::vector<std::string> subjects; // 1 or 2 entries
    Rel rel = Rel::Le;
    std::optional<int64_t> constant;

    std::string text() const;
    bool operator==(const PreconditionTerm& o) const {
        return category == o.category && subjects == o.subjects && rel == o.rel &&
               constant == o.constant;
    }
};

// Returns the function name if `subject` has the form "ret_of(<name>)".
std::optional<std::string> ret_of_subject(const std::string& subject);

struct FunctionModel {
    std::string name;
    // Return initialization; type Void means no return value.
    InitSpec ret;
    // Pointer parameters whose pointee contents the model may overwrite.
    std::vector<std::string> havoc_params;

    // 1 = unconstrained, 2 = return-value preconditions attached (held in
    // EnvironmentModel::preconditions as ret_of terms), 3 = side effects
    // (havoc) modeled.
    int type(const std::vector<PreconditionTerm>& pres) const;
};

struct EnvironmentModel {
    std::vector<InitSpec> input_model; // one per entry parameter
    std::map<std::string, FunctionModel> function_models;
    std::vector<PreconditionTerm> preconditions;
    // Build-configuration values pinned by refinement.
    std::map<std::string, int64_t> config_overrides;
};

// ---------------------------------------------------------------------------
// The unit proof
// ---------------------------------------------------------------------------

struct UnitProof {
    int manifest_version = 1;
    VerificationScope scope;
    LoopBoundMap bounds;
    EnvironmentModel env;
    std::string harness; // MiniC source of `void harness() { ... }`

    // Harness + model text line count; the "proof size" metric.
    int size_lines() const;
};

struct ResourceBudget {
    double time_budget_sec = 60.0;
    uint64_t state_budget = 2'000'000;
};

// ---------------------------------------------------------------------------
// Structural validity
// ---------------------------------------------------------------------------

struct ValidityReport {
    bool compiles = false;
    bool calls_entry = false;
    bool models_well_formed = false;
    std::vector<std::string> messages;

    bool valid() const { return compiles && calls_entry && models_well_formed; }
};

ValidityReport check_structural_validity(const UnitProof& proof, const ProjectIndex& index);

// Return types of the proof's modeled callees, for typechecking.
std::map<std::string, TypeRef> model_extern_sigs(const UnitProof& proof);

// In-scope function definitions, resolved against the scope's file set, in
// deterministic (file, name) order.  Throws InputError when a scope function
// has no definition in the scope files.
std::vector<const FunctionDef*> scope_functions(const UnitProof& proof,
                                                const ProjectIndex& index);

} // namespace soup
