#include "soup/gaps.hpp"

#include <algorithm>
#include <json.hpp>

#include "soup/callgraph.hpp"
#include "soup/diag.hpp"
#include "soup/slice.hpp"

namespace soup {

using json = nlohmann::ordered_json;

const char* gap_class_name(GapClass c) {
    switch (c) {
        case GapClass::LoopDependent: return "loop-dependent";
        case GapClass::ConfigurationDependent: return "configuration-dependent";
        case GapClass::ExternalFunctionDependent: return "external-function-dependent";
        case GapClass::Unclassified: return "unclassified";
    }
    return "?";
}

std::vector<CoverageBlock> uncovered_property_blocks(
    const VerificationReport& report, const std::vector<const FunctionDef*>& fns) {
    std::vector<CoverageBlock> out;
    for (const auto& b : coverage_report(report, fns))
        if (!b.check_ids.empty()) out.push_back(b);
    return out;
}

namespace {

std::set<int> stmt_lines_of(const std::vector<StmtPtr>& body) {
    std::set<int> out;
    for (const auto& s : body) {
        out.insert(s->line);
        if (s->init_stmt) out.insert(s->init_stmt->line);
        auto inner = stmt_lines_of(s->body);
        out.insert(inner.begin(), inner.end());
        auto els = stmt_lines_of(s->els);
        out.insert(els.begin(), els.end());
    }
    return out;
}

struct BranchHit {
    const Stmt* guard = nullptr; // the If statement
    bool then_branch = true;
    int depth = 0;
};

void find_dominating_branch(const std::vector<StmtPtr>& body, const std::set<int>& gap_lines,
                            int depth, std::optional<BranchHit>& best) {
    for (const auto& s : body) {
        if (s->kind == StmtKind::If) {
            auto then_lines = stmt_lines_of(s->body);
            auto else_lines = stmt_lines_of(s->els);
            bool in_then = !gap_lines.empty() &&
                           std::includes(then_lines.begin(), then_lines.end(),
                                         gap_lines.begin(), gap_lines.end());
            bool in_else = !gap_lines.empty() &&
                           std::includes(else_lines.begin(), else_lines.end(),
                                         gap_lines.begin(), gap_lines.end());
            if (in_then || in_else) {
                if (!best || depth >= best->depth) best = BranchHit{s.get(), in_then, depth};
                find_dominating_branch(in_then ? s->body : s->els, gap_lines, depth + 1, best);
                continue;
            }
        }
        find_dominating_branch(s->body, gap_lines, depth + 1, best);
        find_dominating_branch(s->els, gap_lines, depth + 1, best);
    }
}

std::optional<std::string> config_in(const Expr& e, const ProjectIndex& index) {
    std::optional<std::string> found;
    std::function<void(const Expr&)> walk = [&](const Expr& x) {
        if (x.kind == ExprKind::Ident && index.configs.count(x.name)) found = x.name;
        if (x.a) walk(*x.a);
        if (x.b) walk(*x.b);
        for (const auto& a : x.args) walk(*a);
    };
    walk(e);
    return found;
}

// Pointer identifiers read through (Index or Deref) inside `e`.
std::vector<std::string> deref_bases_in(const Expr& e) {
    std::vector<std::string> out;
    std::function<void(const Expr&)> walk = [&](const Expr& x) {
        if (x.kind == ExprKind::Index && x.a->kind == ExprKind::Ident && x.a->type.ptr)
            out.push_back(x.a->name);
        if (x.kind == ExprKind::Unary && x.un == UnOp::Deref && x.a->kind == ExprKind::Ident)
            out.push_back(x.a->name);
        if (x.a) walk(*x.a);
        if (x.b) walk(*x.b);
        for (const auto& a : x.args) walk(*a);
    };
    walk(e);
    return out;
}

// Needed iterations of a counting loop until its guard goes false.
std::optional<int> needed_iterations(const Loop& loop, const ProjectIndex& index,
                                     const std::map<std::string, int64_t>& overrides) {
    if (!loop.induction || !loop.guard || loop.guard->kind != ExprKind::Binary)
        return std::nullopt;
    const Loop::Hint& h = *loop.induction;
    if (h.stride <= 0) return std::nullopt;
    const Expr& g = *loop.guard;
    if (g.a->kind != ExprKind::Ident || g.a->name != h.var) return std::nullopt;
    auto limit = fold_const(*g.b, index, overrides);
    if (!limit) return std::nullopt;
    int64_t span;
    if (g.bin == BinOp::Lt)
        span = *limit - h.init;
    else if (g.bin == BinOp::Le)
        span = *limit + 1 - h.init;
    else
        return std::nullopt;
    if (span <= 0) return 0;
    return static_cast<int>((span + h.stride - 1) / h.stride);
}

const FunctionDef* fn_of_block(const CoverageBlock& block,
                               const std::vector<const FunctionDef*>& fns) {
    for (const FunctionDef* fn : fns)
        if (fn->name == block.function && fn->file == block.file) return fn;
    return nullptr;
}

} // namespace

GapInfo classify_gap(const CoverageBlock& block, const UnitProof& proof,
                     const ProjectIndex& index, const VerificationReport& report) {
    GapInfo gap;
    gap.block = block;
    const FunctionDef* fn = nullptr;
    try {
        fn = fn_of_block(block, scope_functions(proof, index));
    } catch (const InputError&) {
        return gap;
    }
    if (!fn) return gap;

    std::set<int> gap_lines;
    for (int l = block.start_line; l <= block.end_line; ++l)
        if (fn->stmt_lines.count(l)) gap_lines.insert(l);

    std::optional<BranchHit> branch;
    find_dominating_branch(fn->body, gap_lines, 0, branch);

    if (branch) {
        // (a) guard decided by a build configuration value
        if (auto cfg = config_in(*branch->guard->cond, index)) {
            const ConfigDecl& decl = index.configs.at(*cfg);
            if (decl.candidates) {
                for (int64_t cand : *decl.candidates) {
                    std::map<std::string, int64_t> ov = proof.env.config_overrides;
                    ov[*cfg] = cand;
                    auto val = fold_const(*branch->guard->cond, index, ov);
                    if (!val) break;
                    bool takes_branch = (*val != 0) == branch->then_branch;
                    if (takes_branch) {
                        gap.cls = GapClass::ConfigurationDependent;
                        gap.config_name = *cfg;
                        gap.config_value = cand;
                        return gap;
                    }
                }
            }
        }
        // (b) guard reads memory only an external callee writes
        for (const auto& base : deref_bases_in(*branch->guard->cond)) {
            bool done = false;
            for_each_stmt(*fn, [&](const Stmt& s) {
                if (done || s.line >= branch->guard->line) return;
                const Expr* call = nullptr;
                if (s.kind == StmtKind::CallStmt) call = s.call.get();
                else if (s.kind == StmtKind::Assign && s.rhs->kind == ExprKind::Call)
                    call = s.rhs.get();
                else if (s.kind == StmtKind::Decl && s.decl.init &&
                         s.decl.init->kind == ExprKind::Call)
                    call = s.decl.init.get();
                if (!call || !proof.env.function_models.count(call->name)) return;
                for (size_t k = 0; k < call->args.size(); ++k) {
                    const Expr& a = *call->args[k];
                    if (a.kind == ExprKind::Ident && a.name == base) {
                        const FunctionDef* def = index.resolve(call->name, fn->file);
                        if (!def || k >= def->params.size()) continue;
                        gap.cls = GapClass::ExternalFunctionDependent;
                        gap.callee = call->name;
                        gap.havoc_param = def->params[k].name;
                        done = true;
                    }
                }
            });
            if (done) return gap;
        }
    }

    // (c) block sits behind a loop that saturated its unwinding bound
    const Loop* best = nullptr;
    for (const auto& lp : fn->loops) {
        if (!report.saturated_loops.count(lp.id)) continue;
        bool after = lp.body_last_line < block.start_line;
        bool inside = lp.body_first_line <= block.start_line &&
                      block.end_line <= lp.body_last_line;
        if (!after && !inside) continue;
        if (!best || lp.header_line > best->header_line) best = &lp;
    }
    if (best) {
        gap.cls = GapClass::LoopDependent;
        gap.loop_id = best->id;
        auto n = needed_iterations(*best, index, proof.env.config_overrides);
        if (n) gap.needed_bound = *n + 1;
        return gap;
    }
    return gap;
}

bool apply_gap_repair(const GapInfo& gap, UnitProof& proof) {
    switch (gap.cls) {
        case GapClass::LoopDependent: {
            if (gap.needed_bound < 1) return false;
            int cur = proof.bounds.bound_of(gap.loop_id);
            if (gap.needed_bound <= cur) return false;
            proof.bounds.bounds[gap.loop_id] = gap.needed_bound;
            return true;
        }
        case GapClass::ConfigurationDependent:
            proof.env.config_overrides[gap.config_name] = gap.config_value;
            return true;
        case GapClass::ExternalFunctionDependent: {
            auto it = proof.env.function_models.find(gap.callee);
            if (it == proof.env.function_models.end()) return false;
            auto& hv = it->second.havoc_params;
            if (std::find(hv.begin(), hv.end(), gap.havoc_param) != hv.end()) return false;
            hv.push_back(gap.havoc_param);
            return true;
        }
        case GapClass::Unclassified: return false;
    }
    return false;
}

std::optional<MinBoundEstimate> min_bound_to_violate(const Loop& loop, const FunctionDef& fn,
                                                     const UnitProof& proof,
                                                     const ProjectIndex& index) {
    if (!loop.induction || loop.induction->stride <= 0) return std::nullopt;
    const Loop::Hint& h = *loop.induction;
    const Stmt* ls = find_loop_stmt(fn, loop.id);
    if (!ls) return std::nullopt;

    std::optional<int64_t> extent;
    std::string how;

    // The object the loop's induction variable indexes into, searched in the
    // loop body and one call level down.
    std::function<void(const std::vector<StmtPtr>&, const FunctionDef&,
                       const std::map<std::string, std::string>&)>
        scan = [&](const std::vector<StmtPtr>& body, const FunctionDef& where,
                   const std::map<std::string, std::string>& idx_aliases) {
            auto consider_access = [&](const Expr& x) {
                if (extent) return;
                if (x.kind != ExprKind::Index || x.a->kind != ExprKind::Ident) return;
                bool idx_hits = mentions(*x.b, h.var);
                for (const auto& [alias, origin] : idx_aliases)
                    idx_hits = idx_hits || mentions(*x.b, alias);
                if (!idx_hits) return;
                if (x.a->array_len >= 0) {
                    extent = x.a->array_len;
                    how = "fixed array '" + x.a->name + "' of " +
                          std::to_string(x.a->array_len) + " elements";
                    return;
                }
                // A pointer: resolvable when it is (an alias of) an entry
                // pointer parameter.
                std::string origin_param = x.a->name;
                auto al = idx_aliases.find("ptr:" + x.a->name);
                if (al != idx_aliases.end()) origin_param = al->second;
                auto info = entry_param_extent(origin_param, proof, index);
                if (info) {
                    extent = info->extent;
                    how = "object behind '" + origin_param + "': " + info->how;
                }
            };
            for (const auto& s : body) {
                for (const ExprPtr& e : {s->lhs, s->rhs, s->cond, s->n, s->call}) {
                    if (!e) continue;
                    std::function<void(const Expr&)> w = [&](const Expr& x) {
                        consider_access(x);
                        if (x.a) w(*x.a);
                        if (x.b) w(*x.b);
                        for (const auto& a : x.args) w(*a);
                    };
                    w(*e);
                    // One call level down: map arguments onto callee params.
                    std::function<void(const Expr&)> calls = [&](const Expr& x) {
                        if (x.kind == ExprKind::Call && !is_intrinsic_call(x.name) &&
                            proof.scope.functions.count(x.name) && !extent) {
                            const FunctionDef* g = index.resolve(x.name, where.file);
                            if (g && g->params.size() == x.args.size() && &where != g) {
                                std::map<std::string, std::string> aliases;
                                for (size_t k = 0; k < x.args.size(); ++k) {
                                    const Expr& a = *x.args[k];
                                    if (a.kind != ExprKind::Ident) {
                                        if (mentions(a, h.var))
                                            aliases[g->params[k].name] = h.var;
                                        continue;
                                    }
                                    if (a.type.ptr)
                                        aliases["ptr:" + g->params[k].name] =
                                            a.array_len >= 0 ? a.name : a.name;
                                    else if (a.name == h.var)
                                        aliases[g->params[k].name] = h.var;
                                }
                                scan(g->body, *g, aliases);
                            }
                        }
                        if (x.a) calls(*x.a);
                        if (x.b) calls(*x.b);
                        for (const auto& a : x.args) calls(*a);
                    };
                    calls(*e);
                }
                if (s->kind == StmtKind::Decl && s->decl.init) {
                    std::function<void(const Expr&)> w = [&](const Expr& x) {
                        consider_access(x);
                        if (x.a) w(*x.a);
                        if (x.b) w(*x.b);
                        for (const auto& a : x.args) w(*a);
                    };
                    w(*s->decl.init);
                }
                scan(s->body, where, idx_aliases);
                scan(s->els, where, idx_aliases);
            }
        };
    scan(ls->body, fn, {});
    if (!extent) return std::nullopt;

    int64_t span = *extent - h.init;
    int bound = span <= 0 ? 1 : static_cast<int>((span + h.stride - 1) / h.stride) + 1;
    MinBoundEstimate est;
    est.loop_id = loop.id;
    est.bound = bound;
    est.derivation = "extent " + std::to_string(*extent) + " (" + how + "), start " +
                     std::to_string(h.init) + ", stride " + std::to_string(h.stride) +
                     " -> bound ceil((" + std::to_string(*extent) + " - " +
                     std::to_string(h.init) + ") / " + std::to_string(h.stride) + ") + 1 = " +
                     std::to_string(bound);
    return est;
}

namespace {

// Resolves a task against the resolver, logging the exchange; returns the
// accepted content json (remote override or rule default).
json resolve_logged(Resolver& resolver, StageLog& log, TaskKind kind, const json& payload,
                    const json& rule_content, const std::string& constraints,
                    const std::string& rationale) {
    SemanticTask task;
    task.kind = kind;
    task.payload_json = payload.dump();
    task.constraints = constraints;
    TaskProposal rule;
    rule.content_json = rule_content.dump();
    rule.rationale = rationale;
    TaskProposal got = resolver.resolve(task, rule);
    AgentLogEvent ev;
    ev.stage = "bounds";
    ev.task = task_kind_name(kind);
    ev.payload = task.payload_json;
    ev.proposal = got.content_json;
    ev.rationale = got.rationale;
    ev.from_fallback = got.from_fallback;
    log.events.push_back(std::move(ev));
    try {
        return json::parse(got.content_json);
    } catch (const std::exception&) {
        return rule_content;
    }
}

json gap_to_json(const GapInfo& gap) {
    json j;
    j["classification"] = gap_class_name(gap.cls);
    if (gap.cls == GapClass::LoopDependent) {
        j["loop"] = gap.loop_id;
        j["bound"] = gap.needed_bound;
    } else if (gap.cls == GapClass::ConfigurationDependent) {
        j["config"] = gap.config_name;
        j["value"] = gap.config_value;
    } else if (gap.cls == GapClass::ExternalFunctionDependent) {
        j["callee"] = gap.callee;
        j["param"] = gap.havoc_param;
    }
    return j;
}

void gap_from_json(GapInfo& gap, const json& j) {
    std::string cls = j.value("classification", "unclassified");
    for (GapClass c : {GapClass::LoopDependent, GapClass::ConfigurationDependent,
                       GapClass::ExternalFunctionDependent, GapClass::Unclassified})
        if (cls == gap_class_name(c)) gap.cls = c;
    if (gap.cls == GapClass::LoopDependent) {
        gap.loop_id = j.value("loop", gap.loop_id);
        gap.needed_bound = j.value("bound", gap.needed_bound);
    } else if (gap.cls == GapClass::ConfigurationDependent) {
        gap.config_name = j.value("config", gap.config_name);
        gap.config_value = j.value("value", gap.config_value);
    } else if (gap.cls == GapClass::ExternalFunctionDependent) {
        gap.callee = j.value("callee", gap.callee);
        gap.havoc_param = j.value("param", gap.havoc_param);
    }
}

void log_gate(StageLog& log, const std::string& what, const GateResult& gate) {
    AgentLogEvent ev;
    ev.stage = "bounds";
    ev.task = "gate";
    ev.payload = what;
    ev.proposal = "";
    ev.gated = true;
    ev.accepted = gate.accepted;
    ev.gate_reasons = gate.reasons;
    log.events.push_back(std::move(ev));
}

} // namespace

BoundStageResult run_bound_stage(const UnitProof& start, const ProjectIndex& index,
                                 const EngineOptions& opts, Resolver& resolver,
                                 StageLog& log) {
    BoundStageResult out;
    out.proof = start;
    out.report = verify(out.proof, index, opts);

    // Phase 1: repair classified coverage gaps until a fixpoint.
    for (int round = 0; round < 16; ++round) {
        if (out.report.status == VerifyStatus::Error) break;
        std::vector<const FunctionDef*> fns;
        try {
            fns = scope_functions(out.proof, index);
        } catch (const InputError&) {
            break;
        }
        auto blocks = uncovered_property_blocks(out.report, fns);
        bool progress = false;
        for (const auto& block : blocks) {
            GapInfo gap = classify_gap(block, out.proof, index, out.report);
            json payload;
            payload["file"] = block.file;
            payload["function"] = block.function;
            payload["lines"] = {block.start_line, block.end_line};
            payload["checks"] = block.check_ids;
            json resolved = resolve_logged(
                resolver, log, TaskKind::ClassifyCoverageGap, payload, gap_to_json(gap),
                "classify why the block stayed uncovered", "syntactic dominator analysis");
            gap_from_json(gap, resolved);
            if (gap.cls == GapClass::Unclassified) continue;

            UnitProof candidate = out.proof;
            if (!apply_gap_repair(gap, candidate)) continue;
            resolve_logged(resolver, log, TaskKind::RepairCoverageGap, gap_to_json(gap),
                           gap_to_json(gap), "apply the classified repair",
                           "repair derived from classification");
            VerificationReport crep = verify(candidate, index, opts);
            GateResult gate =
                gate_check(candidate, index, out.report, crep, GateGoal::ImproveCoverage);
            bool now_covered =
                crep.covered_lines.count(block.file) &&
                crep.covered_lines.at(block.file).count(block.start_line) > 0;
            if (!now_covered)
                gate.reasons.push_back("repair did not reach the uncovered block"),
                    gate.accepted = false;
            log_gate(log, "repair " + block.file + ":" + std::to_string(block.start_line) +
                              "-" + std::to_string(block.end_line) + " as " +
                              gap_class_name(gap.cls),
                     gate);
            if (gate.accepted) {
                out.proof = std::move(candidate);
                out.report = std::move(crep);
                progress = true;
                break; // recompute blocks against the new report
            }
        }
        if (!progress) break;
    }

    // Phase 2: raise saturated loops to their minimum bound-to-violate.
    std::vector<std::string> saturated(out.report.saturated_loops.begin(),
                                       out.report.saturated_loops.end());
    for (const auto& loop_id : saturated) {
        std::vector<const FunctionDef*> fns;
        try {
            fns = scope_functions(out.proof, index);
        } catch (const InputError&) {
            break;
        }
        const FunctionDef* fn = nullptr;
        const Loop* loop = nullptr;
        for (const FunctionDef* f : fns)
            for (const auto& lp : f->loops)
                if (lp.id == loop_id) {
                    fn = f;
                    loop = &lp;
                }
        if (!loop) continue;
        auto est = min_bound_to_violate(*loop, *fn, out.proof, index);
        if (!est) continue;
        json payload;
        payload["loop"] = loop_id;
        payload["start"] = loop->induction ? loop->induction->init : 0;
        payload["stride"] = loop->induction ? loop->induction->stride : 1;
        json rule_content;
        rule_content["loop"] = est->loop_id;
        rule_content["bound"] = est->bound;
        rule_content["derivation"] = est->derivation;
        json resolved =
            resolve_logged(resolver, log, TaskKind::EstimateLoopBound, payload, rule_content,
                           "smallest bound that can step past the object", est->derivation);
        est->bound = resolved.value("bound", est->bound);

        if (est->bound <= out.proof.bounds.bound_of(loop_id)) continue;
        UnitProof candidate = out.proof;
        candidate.bounds.bounds[loop_id] = est->bound;
        VerificationReport crep = verify(candidate, index, opts);
        GateResult gate =
            gate_check(candidate, index, out.report, crep, GateGoal::ExposeBehavior);
        log_gate(log, "bound " + loop_id + " -> " + std::to_string(est->bound), gate);
        if (gate.accepted) {
            out.proof = std::move(candidate);
            out.report = std::move(crep);
        } else {
            out.unapplied.push_back(*est);
        }
    }
    return out;
}

} // namespace soup
