#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace soup {

// ---------------------------------------------------------------------------
// Types.  The language has four scalar types plus one level of pointers.
// Arrays are a declaration form, not a first-class type: an array variable
// carries its element base type and a fixed length, and decays to a pointer
// when used as a value.
// ---------------------------------------------------------------------------

enum class Base { Void, U8, U32, I32, Size };

struct TypeRef {
    Base base = Base::Void;
    bool ptr = false;

    bool operator==(const TypeRef& o) const { return base == o.base && ptr == o.ptr; }
    bool operator!=(const TypeRef& o) const { return !(*this == o); }
    bool is_void() const { return base == Base::Void && !ptr; }
    bool is_int() const { return !ptr && base != Base::Void; }
};

const char* base_name(Base b);
std::string type_name(const TypeRef& t);

// Bit width of an integer type.
int int_width(Base b);
// True for i32 (the only signed type).
bool is_signed(Base b);

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

enum class ExprKind { IntLit, NullLit, Ident, Unary, Binary, Index, Call };
enum class UnOp { Neg, Not, Deref };
enum class BinOp { Add, Sub, Mul, Div, Mod, Shl, Shr, Lt, Le, Gt, Ge, Eq, Ne, LAnd, LOr };

struct Expr;
using ExprPtr = std::shared_ptr<Expr>;

struct Expr {
    ExprKind kind = ExprKind::IntLit;
    int line = 0;
    int col = 0;
    // Stable syntactic site id, unique across a project index.  Clones made
    // during loop unrolling keep the site id of the original node, which lets
    // property checks and nondet-choice labels attach to source sites.
    int site = 0;

    int64_t ival = 0;          // IntLit
    std::string name;          // Ident / Call
    UnOp un = UnOp::Neg;       // Unary
    BinOp bin = BinOp::Add;    // Binary
    ExprPtr a, b;              // Unary operand / Binary lhs,rhs / Index base,index
    std::vector<ExprPtr> args; // Call

    // Filled by the typechecker.
    TypeRef type;
    // For Ident: set when the name denotes a fixed array (which decays to a
    // pointer value); length of the declared array.
    int array_len = -1;
};

// ---------------------------------------------------------------------------
// Statements
// ---------------------------------------------------------------------------

enum class StmtKind {
    Decl,
    Assign,
    If,
    While,
    For,
    Return,
    Assume,
    Assert,
    Free,
    Memcpy,
    Memset,
    CallStmt,
    // Inserted by the unroller in place of a loop's residual iteration; hitting
    // one means the loop guard was still true at the unwinding bound.
    SaturationProbe,
};

struct Stmt;
using StmtPtr = std::shared_ptr<Stmt>;

struct VarDecl {
    std::string name;
    TypeRef type;      // for arrays: element type (ptr == false)
    int array_len = -1; // -1 = not an array
    ExprPtr init;      // may be null
};

struct Stmt {
    StmtKind kind = StmtKind::Return;
    int line = 0;
    int site = 0;

    VarDecl decl;                // Decl
    ExprPtr lhs, rhs;            // Assign; Memcpy/Memset dst,src(or value)
    ExprPtr cond;                // If/While/For guard; Assume/Assert; Return value; Free arg
    ExprPtr n;                   // Memcpy/Memset length
    StmtPtr init_stmt, step_stmt; // For
    std::vector<StmtPtr> body;   // If-then / loop body
    std::vector<StmtPtr> els;    // If-else
    std::string loop_id;         // While/For/SaturationProbe
    ExprPtr call;                // CallStmt
};

// ---------------------------------------------------------------------------
// Declarations and the project index
// ---------------------------------------------------------------------------

struct Loop {
    std::string id;      // "<function>.<k>", k = zero-based textual order
    int header_line = 0;
    bool is_for = false;
    // Recognized counting pattern: var starts at a constant and is bumped by a
    // constant stride each iteration.  Absent when the loop doesn't match.
    struct Hint {
        std::string var;
        int64_t init = 0;
        int64_t stride = 1;
    };
    std::optional<Hint> induction;
    // Guard expression of the loop (shared with the AST).
    ExprPtr guard;
    int body_first_line = 0;
    int body_last_line = 0;
};

struct Param {
    std::string name;
    TypeRef type;
};

struct FunctionDef {
    std::string name;
    std::string file;
    int line = 0;
    TypeRef ret;
    std::vector<Param> params;
    std::vector<StmtPtr> body;
    std::vector<Loop> loops;
    // Lines holding executable statements; the denominator for line coverage.
    std::set<int> stmt_lines;
};

struct ConfigDecl {
    std::string name;
    std::string file;
    int line = 0;
    int64_t value = 0;
    // Present for `config NAME in {a,b,c} = INT;` declarations.
    std::optional<std::vector<int64_t>> candidates;
};

struct GlobalVar {
    VarDecl decl;
    std::string file;
    int line = 0;
};

struct SourceUnit {
    std::string path;
    std::vector<std::string> function_names;
    int line_count = 0;
};

struct ProjectIndex {
    std::vector<SourceUnit> files;
    std::vector<std::shared_ptr<FunctionDef>> functions;
    std::map<std::string, std::vector<std::shared_ptr<FunctionDef>>> by_name;
    std::map<std::string, ConfigDecl> configs;
    std::vector<GlobalVar> globals;
    int next_site = 1;

    // All definitions of `name`, empty vector if unknown.
    const std::vector<std::shared_ptr<FunctionDef>>* candidates(const std::string& name) const;
    // Unique definition of `name`; prefers, then requires, a definition whose
    // file shares the longest path prefix with `from_file` when ambiguous.
    const FunctionDef* resolve(const std::string& name, const std::string& from_file) const;
    const GlobalVar* global(const std::string& name) const;
};

// Length (in characters) of the common path prefix of two file paths,
// counting whole '/'-separated components.
int common_path_prefix(const std::string& a, const std::string& b);

} // namespace soup
