#include "soup/agent.hpp"

#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

namespace soup {

using json = nlohmann::ordered_json;

const char* task_kind_name(TaskKind k) {
    switch (k) {
        case TaskKind::SynthesizeInputModel: return "synthesize-input-model";
        case TaskKind::ModelExternalCallee: return "model-external-callee";
        case TaskKind::ClassifyCoverageGap: return "classify-coverage-gap";
        case TaskKind::RepairCoverageGap: return "repair-coverage-gap";
        case TaskKind::EstimateLoopBound: return "estimate-loop-bound";
        case TaskKind::InferPrecondition: return "infer-precondition";
        case TaskKind::WeakenPrecondition: return "weaken-precondition";
    }
    return "?";
}

const char* gate_goal_name(GateGoal g) {
    switch (g) {
        case GateGoal::ImproveCoverage: return "improve-coverage";
        case GateGoal::ExposeBehavior: return "expose-behavior";
        case GateGoal::SuppressViolation: return "suppress-violation";
    }
    return "?";
}

const char* prompt_for(TaskKind kind) {
    switch (kind) {
        case TaskKind::SynthesizeInputModel:
            return "You synthesize verification harnesses. Given a function signature, "
                   "reply with JSON {\"harness\": \"<source>\"} containing a MiniC "
                   "function `void harness()` that initializes each parameter "
                   "nondeterministically (pointers as bounded allocations with the size "
                   "exposed as <param>_size) and calls the function exactly once. Do not "
                   "constrain inputs beyond type-directed initialization.";
        case TaskKind::ModelExternalCallee:
            return "You model external callees for bounded verification. Given a callee "
                   "signature, reply with JSON {\"return\": \"<initspec>\", \"havoc\": "
                   "[<pointer params>]} using the initializer grammar `nondet <type>` or "
                   "`alloc <type> size nondet <lo> <hi>`.";
        case TaskKind::ClassifyCoverageGap:
            return "You classify why a statement block stayed unreached under bounded "
                   "verification. Reply with JSON {\"classification\": one of "
                   "\"loop-dependent\", \"configuration-dependent\", "
                   "\"external-function-dependent\", \"unclassified\", plus the fields "
                   "the classification needs (loop, config/value, callee/param)}.";
        case TaskKind::RepairCoverageGap:
            return "You repair coverage gaps. Reply with JSON {\"action\": \"set-bound\" "
                   "| \"set-config\" | \"add-havoc\", ...} naming the loop and bound, "
                   "config and value, or callee and parameter.";
        case TaskKind::EstimateLoopBound:
            return "You estimate the smallest loop unwinding bound that could expose an "
                   "out-of-bounds access: with start s, stride t and object extent m the "
                   "answer is ceil((m - s)/t) + 1. Reply with JSON {\"loop\": \"<id>\", "
                   "\"bound\": <n>}.";
        case TaskKind::InferPrecondition:
            return "You infer environment preconditions that suppress a spurious "
                   "memory-safety violation. Reply with JSON {\"terms\": [\"pre "
                   "<category> <subject> <rel> <rhs>\", ...]} over the categories "
                   "pointer-not-null, variable-constant, variable-variable, "
                   "pointer-offset; subjects are entry parameters, exposed size symbols "
                   "or ret_of(<function>).";
        case TaskKind::WeakenPrecondition:
            return "You weaken a precondition minimally so that an observed concrete "
                   "value satisfies it. Reply with JSON {\"term\": \"pre ...\"}.";
    }
    return "";
}

namespace {

class RuleResolver final : public Resolver {
public:
    TaskProposal resolve(const SemanticTask&, const TaskProposal& rule_default) override {
        return rule_default;
    }
    const char* name() const override { return "rule"; }
};

class RemoteResolver final : public Resolver {
public:
    explicit RemoteResolver(RemoteConfig cfg) : cfg_(std::move(cfg)) {}

    TaskProposal resolve(const SemanticTask& task, const TaskProposal& rule_default) override {
        try {
            httplib::Client cli(cfg_.endpoint);
            cli.set_connection_timeout(static_cast<time_t>(cfg_.timeout_sec));
            cli.set_read_timeout(static_cast<time_t>(cfg_.timeout_sec));
            if (const char* tok = std::getenv("SOUPGEN_API_TOKEN"))
                cli.set_bearer_token_auth(tok);

            json user;
            user["task"] = task_kind_name(task.kind);
            user["payload"] = json::parse(task.payload_json.empty() ? "{}" : task.payload_json);
            user["constraints"] = task.constraints;

            json body;
            body["model"] = cfg_.model;
            body["messages"] = json::array({
                json{{"role", "system"}, {"content", prompt_for(task.kind)}},
                json{{"role", "user"}, {"content", user.dump()}},
            });

            auto res = cli.Post("/v1/chat/completions", body.dump(), "application/json");
            if (!res || res->status != 200) return fallback(rule_default, "transport/status");
            json resp = json::parse(res->body);
            std::string content = resp.at("choices").at(0).at("message").at("content");
            // Accept raw JSON or a ```json fenced block.
            auto fence = content.find("```");
            if (fence != std::string::npos) {
                auto start = content.find('\n', fence);
                auto end = content.find("```", start);
                if (start != std::string::npos && end != std::string::npos)
                    content = content.substr(start + 1, end - start - 1);
            }
            json proposal = json::parse(content);
            TaskProposal out;
            out.content_json = proposal.dump();
            out.rationale = "remote proposal";
            return out;
        } catch (const std::exception& e) {
            return fallback(rule_default, e.what());
        }
    }

    const char* name() const override { return "remote"; }

private:
    static TaskProposal fallback(const TaskProposal& rule_default, const std::string& why) {
        TaskProposal out = rule_default;
        out.from_fallback = true;
        out.rationale = "remote resolver failed (" + why + "); rule default used";
        return out;
    }

    RemoteConfig cfg_;
};

} // namespace

std::unique_ptr<Resolver> make_rule_resolver() { return std::make_unique<RuleResolver>(); }

std::unique_ptr<Resolver> make_remote_resolver(const RemoteConfig& cfg) {
    return std::make_unique<RemoteResolver>(cfg);
}

namespace {

size_t covered_line_count(const VerificationReport& r) {
    size_t n = 0;
    for (const auto& [file, lines] : r.covered_lines) n += lines.size();
    return n;
}

} // namespace

GateResult gate_check(const UnitProof& after_proof, const ProjectIndex& index,
                      const VerificationReport& before, const VerificationReport& after,
                      GateGoal goal) {
    GateResult res;
    ValidityReport v = check_structural_validity(after_proof, index);
    if (!v.valid()) {
        res.reasons.push_back("proof became structurally invalid");
        for (const auto& m : v.messages) res.reasons.push_back(m);
    }
    if (after.status == VerifyStatus::Error)
        res.reasons.push_back("verification errored: " + after.error_message);
    if (after.status == VerifyStatus::InconclusiveBudget)
        res.reasons.push_back("verification became inconclusive (budget)");
    if (covered_line_count(after) < covered_line_count(before))
        res.reasons.push_back("line coverage shrank");
    if (after.covered_properties() < before.covered_properties())
        res.reasons.push_back("property coverage shrank");
    if (goal != GateGoal::SuppressViolation) {
        for (const auto& id : before.violated_ids)
            if (!after.violated_ids.count(id))
                res.reasons.push_back("previously exposed violation disappeared: " + id);
    }
    // Newly exposed violations are never grounds for rejection.
    res.accepted = res.reasons.empty();
    return res;
}

std::string StageLog::to_json() const {
    json j = json::array();
    for (const auto& e : events) {
        json ev;
        ev["stage"] = e.stage;
        ev["task"] = e.task;
        ev["payload"] = e.payload;
        ev["proposal"] = e.proposal;
        ev["rationale"] = e.rationale;
        ev["from_fallback"] = e.from_fallback;
        if (e.gated) {
            ev["accepted"] = e.accepted;
            ev["gate_reasons"] = e.gate_reasons;
        }
        j.push_back(std::move(ev));
    }
    return j.dump(2) + "\n";
}

} // namespace soup
