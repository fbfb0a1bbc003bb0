#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "soup/ast.hpp"

namespace soup {

// Intrinsics and builtins never appear as call-graph edges.
bool is_intrinsic_call(const std::string& name);

struct CallSite {
    std::string caller;      // function name
    std::string caller_file;
    int line = 0;
    std::string callee;
};

struct CallGraph {
    // Edges keyed by caller "<file>::<name>"; values are callee names in
    // deterministic (sorted) order.
    std::map<std::string, std::vector<std::string>> edges;
    std::vector<CallSite> sites;
    // Callee names with no definition anywhere in the project.
    std::set<std::string> unresolved;

    static std::string key(const FunctionDef& f) { return f.file + "::" + f.name; }
};

CallGraph build_call_graph(const ProjectIndex& index);

// All call sites whose callee is `name`.
std::vector<CallSite> callsites_of(const CallGraph& cg, const std::string& name);

// Function names reachable from `entry` by direct calls, where traversal only
// descends into functions defined in one of `files`.  The entry itself is
// included.  Ambiguous names resolve toward the caller's file.
std::set<std::string> reachable_within(const ProjectIndex& index, const std::string& entry,
                                       const std::string& entry_file,
                                       const std::set<std::string>& files);

} // namespace soup
