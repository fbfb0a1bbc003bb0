#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "soup/proof.hpp"
#include "soup/report.hpp"

namespace soup {

// The semantic decisions the pipeline delegates.  Every task has a
// deterministic rule-based default; a remote resolver may override it, but its
// proposals pass the same validation gate.
enum class TaskKind {
    SynthesizeInputModel,
    ModelExternalCallee,
    ClassifyCoverageGap,
    RepairCoverageGap,
    EstimateLoopBound,
    InferPrecondition,
    WeakenPrecondition,
};

const char* task_kind_name(TaskKind k);

struct SemanticTask {
    TaskKind kind = TaskKind::SynthesizeInputModel;
    std::string payload_json; // task-specific context, documented in docs/agent-protocol.md
    std::string constraints;  // prose constraints the proposal must obey
};

struct TaskProposal {
    std::string content_json; // task-specific result shape
    std::string rationale;
    bool from_fallback = false; // remote failed, rule default substituted
};

class Resolver {
public:
    virtual ~Resolver() = default;
    // `rule_default` is the deterministic rule-based proposal for this task.
    virtual TaskProposal resolve(const SemanticTask& task, const TaskProposal& rule_default) = 0;
    virtual const char* name() const = 0;
};

// Returns the rule default unchanged; the deterministic configuration.
std::unique_ptr<Resolver> make_rule_resolver();

struct RemoteConfig {
    std::string endpoint; // e.g. http://host:port ; path /v1/chat/completions
    std::string model = "default";
    double timeout_sec = 20.0;
    // Bearer token read from SOUPGEN_API_TOKEN when present.
};

// Chat-completions client: sends the per-kind system prompt plus the task
// payload, expects a JSON proposal back.  Any failure (transport, HTTP status,
// unparsable content) falls back to the rule default and marks the proposal.
std::unique_ptr<Resolver> make_remote_resolver(const RemoteConfig& cfg);

// System prompt used for `kind` by the remote resolver.
const char* prompt_for(TaskKind kind);

// ---------------------------------------------------------------------------
// Validation gate
// ---------------------------------------------------------------------------

enum class GateGoal {
    ImproveCoverage, // repairs: must not lose anything
    ExposeBehavior,  // bound increases: new violations are the point
    SuppressViolation, // env preconditions: may remove violations
};

const char* gate_goal_name(GateGoal g);

struct GateResult {
    bool accepted = false;
    std::vector<std::string> reasons; // why it was rejected (empty when accepted)
};

// Accepts `after` iff it is structurally valid, verification stayed
// conclusive, line/property coverage did not shrink, and (unless the goal is
// suppression) no previously exposed violation disappeared.  Newly exposed
// violations never cause rejection (the exposure exemption).
GateResult gate_check(const UnitProof& after_proof, const ProjectIndex& index,
                      const VerificationReport& before, const VerificationReport& after,
                      GateGoal goal);

// ---------------------------------------------------------------------------
// Audit log
// ---------------------------------------------------------------------------

struct AgentLogEvent {
    std::string stage;     // "scope" | "bounds" | "env"
    std::string task;      // task kind name
    std::string payload;   // task payload json
    std::string proposal;  // proposal content json
    std::string rationale;
    bool from_fallback = false;
    bool gated = false;    // whether a gate decision applies
    bool accepted = false;
    std::vector<std::string> gate_reasons;
};

struct StageLog {
    std::vector<AgentLogEvent> events;
    std::string to_json() const;
};

} // namespace soup
