#include "soup/envref.hpp"

#include <algorithm>
#include <json.hpp>

#include "soup/callgraph.hpp"
#include "soup/diag.hpp"
#include "soup/manifest.hpp"
#include "soup/slice.hpp"
#include "soup/widening.hpp"

namespace soup {

using json = nlohmann::ordered_json;

const char* validation_outcome_name(ValidationOutcome o) {
    switch (o) {
        case ValidationOutcome::Retained: return "retained";
        case ValidationOutcome::Weakened: return "weakened";
        case ValidationOutcome::Rejected: return "rejected";
        case ValidationOutcome::Vacuous: return "vacuous";
    }
    return "?";
}

std::vector<Violation> parse_violation_report(const VerificationReport& report) {
    std::vector<Violation> out = report.violations;
    std::sort(out.begin(), out.end(), [](const Violation& a, const Violation& b) {
        if (a.check.file != b.check.file) return a.check.file < b.check.file;
        if (a.check.line != b.check.line) return a.check.line < b.check.line;
        if (a.check.kind != b.check.kind) return a.check.kind < b.check.kind;
        return a.check.ordinal < b.check.ordinal;
    });
    return out;
}

namespace {

const FunctionDef* function_of_check(const PropertyCheck& check, const UnitProof& proof,
                                     const ProjectIndex& index) {
    try {
        for (const FunctionDef* fn : scope_functions(proof, index))
            if (fn->name == check.function && fn->file == check.file) return fn;
    } catch (const InputError&) {
    }
    return nullptr;
}

// The loop of `fn` whose body contains `line`, innermost (= latest header).
const Loop* loop_containing(const FunctionDef& fn, int line) {
    const Loop* best = nullptr;
    for (const auto& lp : fn.loops)
        if (lp.body_first_line <= line && line <= lp.body_last_line)
            if (!best || lp.header_line > best->header_line) best = &lp;
    return best;
}

// The size symbol the harness exposes for entry pointer parameter `param`.
std::optional<std::string> size_symbol_for(const std::string& param, const UnitProof& proof) {
    for (const auto& is : proof.env.input_model)
        if (is.param == param && is.type.ptr && !is.size_symbol.empty())
            return is.size_symbol;
    return std::nullopt;
}

bool is_entry_scalar_param(const std::string& name, const FunctionDef& entry) {
    for (const auto& p : entry.params)
        if (p.name == name) return p.type.is_int();
    return false;
}

bool is_entry_ptr_param(const std::string& name, const FunctionDef& entry) {
    for (const auto& p : entry.params)
        if (p.name == name) return p.type.ptr;
    return false;
}

PreconditionTerm var_const(const std::string& subject, Rel rel, int64_t c) {
    PreconditionTerm t;
    t.category = PreCat::VariableConstant;
    t.subjects = {subject};
    t.rel = rel;
    t.constant = c;
    return t;
}

// Expressions of `fn` located on `line`.
std::vector<const Expr*> exprs_on_line(const FunctionDef& fn, int line) {
    std::vector<const Expr*> out;
    for_each_expr(fn, [&](const Expr& e) {
        if (e.line == line) out.push_back(&e);
    });
    return out;
}

bool satisfies(Rel rel, int64_t value, int64_t constant) {
    switch (rel) {
        case Rel::Lt: return value < constant;
        case Rel::Le: return value <= constant;
        case Rel::Gt: return value > constant;
        case Rel::Ge: return value >= constant;
        case Rel::Eq: return value == constant;
        case Rel::Ne: return value != constant;
    }
    return false;
}

// Feasible return values of the real implementation of `g`, found by running
// a fresh bounded analysis with `g` as the entry.
std::optional<std::set<int64_t>> enumerate_returns(const std::string& g,
                                                   const ProjectIndex& index,
                                                   const EngineOptions& opts,
                                                   std::string& context_desc) {
    try {
        UnitProof sub = init_proof(index, g, opts.domains);
        VerificationReport rep = verify(sub, index, opts);
        if (rep.status == VerifyStatus::Error || rep.entry_returns.empty()) return std::nullopt;
        std::string vals;
        int shown = 0;
        for (int64_t v : rep.entry_returns) {
            if (shown++ == 8) {
                vals += ", ...";
                break;
            }
            if (!vals.empty()) vals += ", ";
            vals += std::to_string(v);
        }
        context_desc = "implementation of " + g + " returns {" + vals + "}";
        return rep.entry_returns;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

// Concrete values real callers pass for entry scalar parameter `param`:
// constant arguments directly, and the return sets of project functions whose
// result flows into the argument.
std::optional<std::set<int64_t>> callsite_values(const std::string& param,
                                                 const UnitProof& proof,
                                                 const ProjectIndex& index,
                                                 const EngineOptions& opts,
                                                 std::vector<std::string>& contexts) {
    const FunctionDef* entry = nullptr;
    if (const auto* cands = index.candidates(proof.scope.entry))
        for (const auto& f : *cands)
            if (f->file == proof.scope.entry_file) entry = f.get();
    if (!entry) return std::nullopt;
    int pos = -1;
    for (size_t i = 0; i < entry->params.size(); ++i)
        if (entry->params[i].name == param) pos = static_cast<int>(i);
    if (pos < 0) return std::nullopt;

    std::set<int64_t> values;
    bool any_context = false;
    bool all_resolved = true;
    for (const auto& fn : index.functions) {
        if (fn->name == proof.scope.entry) continue;
        for_each_expr(*fn, [&](const Expr& e) {
            if (e.kind != ExprKind::Call || e.name != proof.scope.entry) return;
            if (static_cast<int>(e.args.size()) <= pos) return;
            const Expr& arg = *e.args[static_cast<size_t>(pos)];
            std::string where = fn->file + ":" + std::to_string(e.line);
            if (auto c = fold_const(arg, index, proof.env.config_overrides)) {
                values.insert(*c);
                contexts.push_back("call site " + where + " passes " + std::to_string(*c));
                any_context = true;
                return;
            }
            if (arg.kind == ExprKind::Ident) {
                if (auto src = source_symbol_of(arg.name, *fn, proof)) {
                    if (auto g = ret_of_subject(*src)) {
                        std::string desc;
                        if (auto rets = enumerate_returns(*g, index, opts, desc)) {
                            values.insert(rets->begin(), rets->end());
                            contexts.push_back("call site " + where + ": " + desc);
                            any_context = true;
                            return;
                        }
                    }
                }
            }
            all_resolved = false;
        });
    }
    if (!any_context || !all_resolved) return std::nullopt;
    return values;
}

} // namespace

std::vector<PreconditionTerm> infer_precondition(const Violation& v, const UnitProof& proof,
                                                 const ProjectIndex& index) {
    std::vector<PreconditionTerm> out;
    const FunctionDef* fn = function_of_check(v.check, proof, index);
    if (!fn) return out;
    const FunctionDef* entry = nullptr;
    if (const auto* cands = index.candidates(proof.scope.entry))
        for (const auto& f : *cands)
            if (f->file == proof.scope.entry_file) entry = f.get();
    if (!entry) return out;
    auto exprs = exprs_on_line(*fn, v.check.line);

    switch (v.check.kind) {
        case CheckKind::NullDeref: {
            for (const Expr* e : exprs) {
                const Expr* base = nullptr;
                if (e->kind == ExprKind::Index && e->a->kind == ExprKind::Ident) base = e->a.get();
                if (e->kind == ExprKind::Unary && e->un == UnOp::Deref &&
                    e->a->kind == ExprKind::Ident)
                    base = e->a.get();
                if (base && fn == entry && is_entry_ptr_param(base->name, *entry)) {
                    PreconditionTerm t;
                    t.category = PreCat::PointerNotNull;
                    t.subjects = {base->name};
                    t.rel = Rel::Ne;
                    out.push_back(t);
                    return out;
                }
            }
            return out;
        }
        case CheckKind::DivByZero: {
            for (const Expr* e : exprs) {
                if (e->kind != ExprKind::Binary || (e->bin != BinOp::Div && e->bin != BinOp::Mod))
                    continue;
                if (e->b->kind == ExprKind::Ident && fn == entry &&
                    is_entry_scalar_param(e->b->name, *entry)) {
                    out.push_back(var_const(e->b->name, Rel::Ne, 0));
                    return out;
                }
            }
            return out;
        }
        case CheckKind::ShiftDistanceNegative:
        case CheckKind::ShiftDistanceTooLarge: {
            for (const Expr* e : exprs) {
                if (e->kind != ExprKind::Binary || (e->bin != BinOp::Shl && e->bin != BinOp::Shr))
                    continue;
                if (e->b->kind == ExprKind::Ident && fn == entry &&
                    is_entry_scalar_param(e->b->name, *entry)) {
                    if (v.check.kind == CheckKind::ShiftDistanceNegative)
                        out.push_back(var_const(e->b->name, Rel::Ge, 0));
                    else
                        out.push_back(var_const(e->b->name, Rel::Le,
                                                int_width(e->a->type.base) - 1));
                    return out;
                }
            }
            return out;
        }
        case CheckKind::SignedOverflowAdd:
        case CheckKind::SignedOverflowSub: {
            for (const Expr* e : exprs) {
                if (e->kind != ExprKind::Binary) continue;
                bool add = e->bin == BinOp::Add, sub = e->bin == BinOp::Sub;
                if ((v.check.kind == CheckKind::SignedOverflowAdd && !add) ||
                    (v.check.kind == CheckKind::SignedOverflowSub && !sub))
                    continue;
                auto c = fold_const(*e->b, index, proof.env.config_overrides);
                if (!c || e->a->kind != ExprKind::Ident || fn != entry ||
                    !is_entry_scalar_param(e->a->name, *entry))
                    continue;
                if (add)
                    out.push_back(var_const(e->a->name, Rel::Le, INT32_MAX - *c));
                else
                    out.push_back(var_const(e->a->name, Rel::Ge, INT32_MIN + *c));
                return out;
            }
            return out;
        }
        case CheckKind::ArrayLowerBound: {
            for (const Expr* e : exprs) {
                if (e->kind != ExprKind::Index) continue;
                if (e->b->kind == ExprKind::Ident && fn == entry &&
                    is_entry_scalar_param(e->b->name, *entry)) {
                    out.push_back(var_const(e->b->name, Rel::Ge, 0));
                    return out;
                }
            }
            return out;
        }
        case CheckKind::ArrayUpperBound:
        case CheckKind::OobPointerDeref: {
            // The two-term rule: the loop's limit stays within the smallest
            // object a real caller supplies (term 1), and the supplied object
            // is large enough for the highest index the loop touches (term 2).
            for (const Expr* e : exprs) {
                if (e->kind != ExprKind::Index || e->a->kind != ExprKind::Ident) continue;
                const std::string ptr = e->a->name;
                if (fn != entry || !is_entry_ptr_param(ptr, *entry)) {
                    // Constant index into an entry pointer, outside a loop.
                    continue;
                }
                auto extent = entry_param_extent(ptr, proof, index);
                const Loop* loop = loop_containing(*fn, v.check.line);
                if (loop && loop->guard && loop->guard->kind == ExprKind::Binary &&
                    (loop->guard->bin == BinOp::Lt || loop->guard->bin == BinOp::Le) &&
                    loop->guard->a->kind == ExprKind::Ident &&
                    mentions(*e->b, loop->guard->a->name) && extent && extent->from_callsite) {
                    int64_t pivot = extent->extent;
                    const Expr& limit = *loop->guard->b;
                    if (limit.kind == ExprKind::Ident) {
                        if (auto src = source_symbol_of(limit.name, *fn, proof))
                            out.push_back(var_const(*src, Rel::Le, pivot));
                    }
                    int64_t maxidx = loop->guard->bin == BinOp::Le ? pivot : pivot - 1;
                    if (auto sym = size_symbol_for(ptr, proof))
                        out.push_back(var_const(*sym, Rel::Ge, maxidx + 1));
                    if (!out.empty()) return out;
                }
                // Loop bounded by a compile-time constant: the highest index
                // touched is known statically, so demand that many elements.
                if (loop && loop->guard && loop->guard->kind == ExprKind::Binary &&
                    (loop->guard->bin == BinOp::Lt || loop->guard->bin == BinOp::Le) &&
                    loop->guard->a->kind == ExprKind::Ident &&
                    mentions(*e->b, loop->guard->a->name)) {
                    if (auto lim = fold_const(*loop->guard->b, index, proof.env.config_overrides)) {
                        int64_t maxidx = loop->guard->bin == BinOp::Le ? *lim : *lim - 1;
                        if (auto sym = size_symbol_for(ptr, proof)) {
                            out.push_back(var_const(*sym, Rel::Ge, maxidx + 1));
                            return out;
                        }
                    }
                }
                // Fallback: constant index c needs at least c+1 elements.
                if (auto c = fold_const(*e->b, index, proof.env.config_overrides)) {
                    if (auto sym = size_symbol_for(ptr, proof)) {
                        out.push_back(var_const(*sym, Rel::Ge, *c + 1));
                        return out;
                    }
                }
            }
            return out;
        }
        default: return out;
    }
}

std::optional<PreconditionTerm> weaken_precondition(const PreconditionTerm& term,
                                                    int64_t observed) {
    if (term.category != PreCat::VariableConstant || !term.constant) return std::nullopt;
    PreconditionTerm t = term;
    switch (term.rel) {
        case Rel::Le:
            if (observed <= *term.constant) return std::nullopt;
            t.constant = observed;
            return t;
        case Rel::Lt:
            if (observed < *term.constant) return std::nullopt;
            t.constant = observed + 1;
            return t;
        case Rel::Ge:
            if (observed >= *term.constant) return std::nullopt;
            t.constant = observed;
            return t;
        case Rel::Gt:
            if (observed > *term.constant) return std::nullopt;
            t.constant = observed - 1;
            return t;
        default: return std::nullopt;
    }
}

ValidationResult validate_precondition(const PreconditionTerm& term,
                                       const std::string& target_property,
                                       const UnitProof& proof, const ProjectIndex& index,
                                       const EngineOptions& opts) {
    ValidationResult res;
    res.term = term;
    if (term.category != PreCat::VariableConstant || term.subjects.size() != 1 ||
        !term.constant) {
        res.outcome = ValidationOutcome::Vacuous;
        return res;
    }
    const std::string& subject = term.subjects[0];

    std::optional<std::set<int64_t>> values;
    if (auto g = ret_of_subject(subject)) {
        std::string desc;
        values = enumerate_returns(*g, index, opts, desc);
        if (values) res.contexts.push_back(desc);
    } else {
        bool is_size_symbol = false;
        std::string owner;
        for (const auto& is : proof.env.input_model)
            if (is.size_symbol == subject) {
                is_size_symbol = true;
                owner = is.param;
            }
        if (is_size_symbol) {
            auto extent = entry_param_extent(owner, proof, index);
            if (extent && extent->from_callsite) {
                values = std::set<int64_t>{extent->extent};
                res.contexts.push_back(extent->how);
            }
        } else {
            values = callsite_values(subject, proof, index, opts, res.contexts);
        }
    }

    if (!values || values->empty()) {
        res.outcome = ValidationOutcome::Vacuous;
        res.contexts.clear();
        return res;
    }

    PreconditionTerm current = term;
    for (int step = 0; step <= 4; ++step) {
        std::optional<int64_t> breaking;
        for (int64_t v : *values)
            if (!satisfies(current.rel, v, *current.constant)) {
                breaking = v;
                break;
            }
        if (!breaking) {
            res.outcome = step == 0 ? ValidationOutcome::Retained : ValidationOutcome::Weakened;
            res.term = current;
            return res;
        }
        // Replay the breaking value: does the target property fire again?
        VerificationReport pinned =
            verify_pinned(proof, index, opts, PinnedValue{subject, *breaking});
        if (pinned.violated(target_property)) {
            res.outcome = ValidationOutcome::Rejected;
            res.breaking_value = *breaking;
            for (const auto& id : pinned.violated_ids) res.linked_sinks.push_back(id);
            return res;
        }
        auto weaker = weaken_precondition(current, *breaking);
        if (!weaker) break;
        current = *weaker;
    }
    res.outcome = ValidationOutcome::Rejected;
    return res;
}

namespace {

json term_json(const PreconditionTerm& t) { return precondition_to_text(t); }

void log_env_task(Resolver& resolver, StageLog& log, TaskKind kind, const json& payload,
                  json& content, const std::string& constraints,
                  const std::string& rationale) {
    SemanticTask task;
    task.kind = kind;
    task.payload_json = payload.dump();
    task.constraints = constraints;
    TaskProposal rule;
    rule.content_json = content.dump();
    rule.rationale = rationale;
    TaskProposal got = resolver.resolve(task, rule);
    AgentLogEvent ev;
    ev.stage = "env";
    ev.task = task_kind_name(kind);
    ev.payload = task.payload_json;
    ev.proposal = got.content_json;
    ev.rationale = got.rationale;
    ev.from_fallback = got.from_fallback;
    log.events.push_back(std::move(ev));
    try {
        content = json::parse(got.content_json);
    } catch (const std::exception&) {
    }
}

void log_env_gate(StageLog& log, const std::string& what, const GateResult& gate) {
    AgentLogEvent ev;
    ev.stage = "env";
    ev.task = "gate";
    ev.payload = what;
    ev.gated = true;
    ev.accepted = gate.accepted;
    ev.gate_reasons = gate.reasons;
    log.events.push_back(std::move(ev));
}

bool has_term(const UnitProof& proof, const PreconditionTerm& t) {
    for (const auto& p : proof.env.preconditions)
        if (p == t) return true;
    return false;
}

} // namespace

EnvStageResult run_env_stage(const UnitProof& start, const ProjectIndex& index,
                             const EngineOptions& opts, Resolver& resolver, StageLog& log) {
    EnvStageResult out;
    out.proof = start;
    out.report = verify(out.proof, index, opts);

    std::set<std::string> processed;
    for (int round = 0; round < 32; ++round) {
        if (out.report.status == VerifyStatus::Error) break;
        const Violation* next = nullptr;
        auto queue = parse_violation_report(out.report);
        for (const auto& v : queue)
            if (!processed.count(v.check.id())) {
                next = &v;
                break;
            }
        if (!next) break;
        Violation v = *next;
        processed.insert(v.check.id());

        std::vector<PreconditionTerm> candidates = infer_precondition(v, out.proof, index);
        json payload;
        payload["property"] = v.check.id();
        payload["guard"] = v.check.guard;
        {
            json w = json::array();
            for (const auto& [label, val] : v.witness.assignment)
                w.push_back({{"label", label}, {"value", val}});
            payload["witness"] = w;
        }
        json content;
        content["terms"] = json::array();
        for (const auto& t : candidates) content["terms"].push_back(term_json(t));
        log_env_task(resolver, log, TaskKind::InferPrecondition, payload, content,
                     "preconditions over harness symbols that rule out the witness",
                     candidates.empty() ? "no grammar instance applies"
                                        : "guard/limit flow analysis");
        if (content.contains("terms") && content["terms"].is_array()) {
            std::vector<PreconditionTerm> parsed;
            bool ok = true;
            for (const auto& s : content["terms"]) {
                if (!s.is_string()) { ok = false; break; }
                try {
                    parsed.push_back(precondition_from_text(s.get<std::string>()));
                } catch (const std::exception&) {
                    ok = false;
                    break;
                }
            }
            if (ok) candidates = std::move(parsed);
        }

        MemorySafetyError err;
        err.property = v.check;
        err.witness = v.witness;

        if (candidates.empty()) {
            out.errors.push_back(std::move(err));
            continue;
        }

        std::vector<std::pair<PreconditionTerm, ValidationOutcome>> kept;
        bool rejected_any = false;
        for (const auto& term : candidates) {
            ValidationResult vr =
                validate_precondition(term, v.check.id(), out.proof, index, opts);
            if (vr.outcome == ValidationOutcome::Weakened) {
                json wp, wc;
                wp["term"] = term_json(term);
                wp["observed"] = vr.breaking_value ? *vr.breaking_value : 0;
                wc["term"] = term_json(vr.term);
                log_env_task(resolver, log, TaskKind::WeakenPrecondition, wp, wc,
                             "smallest weakening admitting every real context",
                             "observed context value outside the candidate term");
            }
            for (const auto& c : vr.contexts) err.contexts.push_back(c);
            if (vr.outcome == ValidationOutcome::Rejected) {
                rejected_any = true;
                err.rejected_precondition = vr.term;
                err.linked_sinks = vr.linked_sinks;
                continue;
            }
            kept.emplace_back(vr.term, vr.outcome);
        }

        UnitProof candidate = out.proof;
        for (const auto& [t, o] : kept)
            if (!has_term(candidate, t)) candidate.env.preconditions.push_back(t);
        VerificationReport crep = verify(candidate, index, opts);
        GateResult gate =
            gate_check(candidate, index, out.report, crep, GateGoal::SuppressViolation);
        bool target_gone = !crep.violated(v.check.id());
        log_env_gate(log, "suppress " + v.check.id(), gate);

        if (gate.accepted && !kept.empty()) {
            out.proof = std::move(candidate);
            out.report = std::move(crep);
            if (target_gone) {
                for (const auto& [t, o] : kept) {
                    SuppressedEntry se;
                    se.property = v.check.id();
                    se.term = t;
                    se.validated = o != ValidationOutcome::Vacuous;
                    out.suppressed.push_back(std::move(se));
                }
                if (!rejected_any) continue;
            }
        }
        if (!target_gone || rejected_any) out.errors.push_back(std::move(err));
    }

    // Drop terms the final verdict does not depend on: remove one at a time
    // and keep the removal when nothing resurfaces.
    if (out.report.status == VerifyStatus::Verified) {
        bool changed = true;
        while (changed) {
            changed = false;
            for (size_t i = 0; i < out.proof.env.preconditions.size(); ++i) {
                UnitProof trial = out.proof;
                trial.env.preconditions.erase(trial.env.preconditions.begin() +
                                              static_cast<long>(i));
                VerificationReport trep = verify(trial, index, opts);
                if (trep.status == VerifyStatus::Verified && trep.violations.empty()) {
                    out.proof = std::move(trial);
                    out.report = std::move(trep);
                    changed = true;
                    break;
                }
            }
        }
    }
    return out;
}

std::string errors_to_json(const EnvStageResult& result) {
    json j;
    j["schema-version"] = 1;
    json errs = json::array();
    for (const auto& e : result.errors) {
        json o;
        o["property"] = e.property.id();
        o["kind"] = check_kind_name(e.property.kind);
        o["file"] = e.property.file;
        o["line"] = e.property.line;
        o["function"] = e.property.function;
        o["guard"] = e.property.guard;
        json w;
        w["assignment"] = json::array();
        for (const auto& [label, val] : e.witness.assignment)
            w["assignment"].push_back({{"label", label}, {"value", val}});
        w["trace"] = e.witness.trace;
        o["witness"] = w;
        if (e.rejected_precondition)
            o["rejected-precondition"] = precondition_to_text(*e.rejected_precondition);
        else
            o["rejected-precondition"] = nullptr;
        o["contexts"] = e.contexts;
        o["linked-sinks"] = e.linked_sinks;
        errs.push_back(std::move(o));
    }
    j["errors"] = errs;
    json sup = json::array();
    for (const auto& s : result.suppressed) {
        json o;
        o["property"] = s.property;
        o["precondition"] = precondition_to_text(s.term);
        o["validated"] = s.validated;
        sup.push_back(std::move(o));
    }
    j["suppressed"] = sup;
    return j.dump(2) + "\n";
}

} // namespace soup
