#include "soup/engine.hpp"

#include <chrono>
#include <deque>
#include <limits>
#include <unordered_map>

#include "soup/callgraph.hpp"
#include "soup/checks.hpp"
#include "soup/diag.hpp"
#include "soup/parser.hpp"
#include "soup/printer.hpp"
#include "soup/slice.hpp"
#include "soup/typecheck.hpp"
#include "soup/unroll.hpp"

namespace soup {

namespace {

constexpr int64_t kU32Max = 0xFFFFFFFFll;

// ---------------------------------------------------------------------------
// Values and memory
// ---------------------------------------------------------------------------

struct PtrVal {
    int32_t alloc = 0; // 0 = NULL, -1 = invalid/uninitialized
    int64_t off = 0;

    bool operator==(const PtrVal& o) const { return alloc == o.alloc && off == o.off; }
};

struct Value {
    TypeRef type; // type.ptr selects the payload
    int64_t i = 0;
    PtrVal p;

    static Value integer(Base b, int64_t v) {
        Value x;
        x.type = {b, false};
        x.i = v;
        return x;
    }
    static Value pointer(Base elem, PtrVal pv) {
        Value x;
        x.type = {elem, true};
        x.p = pv;
        return x;
    }
};

struct Cell {
    enum State { Uninit, Lazy, Concrete } st = Uninit;
    int64_t v = 0;
};

struct Alloc {
    Base elem = Base::U8;
    int64_t size = 0; // in elements
    enum State { Alive, Freed, Dead } state = Alive;
    bool dynamic = false;
    bool default_lazy = false; // unwritten cells read as fresh nondet values
    std::unordered_map<int64_t, Cell> cells;
};

// ---------------------------------------------------------------------------
// Choice enumeration (depth-first over the dynamic decision stack)
// ---------------------------------------------------------------------------

struct ChoicePoint {
    std::vector<int64_t> domain;
    size_t idx = 0;
    std::string label;
};

class Enumerator {
public:
    int64_t choose(std::vector<int64_t> domain, std::string label) {
        if (cursor_ < stack_.size()) {
            ChoicePoint& cp = stack_[cursor_++];
            return cp.domain[cp.idx];
        }
        stack_.push_back({std::move(domain), 0, std::move(label)});
        ++cursor_;
        return stack_.back().domain[0];
    }

    // Advances to the next unexplored run; false when the space is exhausted.
    bool advance() {
        while (!stack_.empty()) {
            ChoicePoint& cp = stack_.back();
            if (++cp.idx < cp.domain.size()) {
                cursor_ = 0;
                return true;
            }
            stack_.pop_back();
        }
        return false;
    }

    void rewind() { cursor_ = 0; }

    std::vector<std::pair<std::string, int64_t>> assignment() const {
        std::vector<std::pair<std::string, int64_t>> out;
        for (size_t k = 0; k < cursor_; ++k)
            out.emplace_back(stack_[k].label, stack_[k].domain[stack_[k].idx]);
        return out;
    }

private:
    std::vector<ChoicePoint> stack_;
    size_t cursor_ = 0;
};

// Run-control exceptions.
struct PrunedRun {};
struct ViolationAbort {};
struct ReturnEx {
    Value value;
    bool has_value = false;
};

struct Frame {
    const FunctionDef* fn = nullptr;
    std::map<std::string, Value> vars;
    std::vector<int32_t> stack_allocs;
};

// ---------------------------------------------------------------------------
// The evaluator
// ---------------------------------------------------------------------------

class Engine {
public:
    Engine(const UnitProof& proof, const ProjectIndex& index, const EngineOptions& opts)
        : proof_(proof), index_(index), opts_(opts) {}

    VerificationReport run() {
        VerificationReport rep;
        try {
            setup();
        } catch (const std::exception& e) {
            rep.status = VerifyStatus::Error;
            rep.error_message = e.what();
            return rep;
        }
        rep.checks = instr_.checks;

        auto t0 = std::chrono::steady_clock::now();
        bool budget_hit = false;
        while (true) {
            one_run();
            ++states_;
            if (!enum_.advance()) break;
            // More work remains: admissible only while within both budgets.
            if (states_ >= opts_.budget.state_budget) {
                budget_hit = true;
                break;
            }
            double elapsed =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            if (elapsed > opts_.budget.time_budget_sec) {
                budget_hit = true;
                break;
            }
        }

        rep.states = states_;
        rep.wall_ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        rep.covered_lines = covered_lines_;
        rep.evaluated_checks = evaluated_;
        rep.saturated_loops = saturated_;
        rep.violations = violations_;
        rep.violated_ids = violated_ids_;
        rep.entry_returns = entry_returns_;
        rep.status = budget_hit ? VerifyStatus::InconclusiveBudget
                     : violations_.empty() ? VerifyStatus::Verified
                                           : VerifyStatus::ViolationsFound;
        return rep;
    }

private:
    const UnitProof& proof_;
    const ProjectIndex& index_;
    const EngineOptions& opts_;

    std::shared_ptr<FunctionDef> harness_;
    std::map<std::string, const FunctionDef*> scope_fns_;
    std::map<std::string, std::vector<StmtPtr>> unrolled_;
    Instrumentation instr_;
    Enumerator enum_;

    // Per-run state.
    std::vector<Alloc> allocs_; // id = index + 1
    std::map<std::string, Value> globals_;
    std::vector<Frame*> frames_;
    std::map<int, int> site_occ_;
    std::deque<std::string> trace_;
    int depth_ = 0;
    // Preconditions over harness symbols, applied as soon as every subject is
    // defined; index into env.preconditions -> applied flag.
    std::vector<bool> pre_applied_;

    // Accumulated results.
    uint64_t states_ = 0;
    std::map<std::string, std::set<int>> covered_lines_;
    std::set<std::string> evaluated_;
    std::set<std::string> saturated_;
    std::vector<Violation> violations_;
    std::set<std::string> violated_ids_;
    std::set<int64_t> entry_returns_;

    // ---- setup ------------------------------------------------------------

    void setup() {
        std::vector<const FunctionDef*> fns = scope_functions(proof_, index_);
        ExternSigs externs = model_extern_sigs(proof_);
        for (const FunctionDef* fn : fns) {
            typecheck_function(const_cast<FunctionDef&>(*fn), index_, externs);
            scope_fns_[fn->name] = fn;
        }
        ProjectIndex scratch;
        scratch.next_site = 1'000'000'000;
        harness_ = parse_harness(scratch, proof_.harness, "<harness>");
        typecheck_function(*harness_, index_, externs);

        std::vector<const FunctionDef*> all = fns;
        all.push_back(harness_.get());
        instr_ = instrument(all);

        for (const FunctionDef* fn : all)
            unrolled_[fn == harness_.get() ? "<harness>" : fn->name] =
                unroll_body(fn->body, proof_.bounds);

        // Surface gross structural problems as verification errors.
        ValidityReport v = check_structural_validity(proof_, index_);
        if (!v.valid()) {
            std::string msg = "structurally invalid proof";
            for (const auto& m : v.messages) msg += "; " + m;
            throw InputError(msg);
        }
    }

    // ---- per-run plumbing -------------------------------------------------

    void one_run() {
        allocs_.clear();
        globals_.clear();
        frames_.clear();
        site_occ_.clear();
        trace_.clear();
        depth_ = 0;
        pre_applied_.assign(proof_.env.preconditions.size(), false);
        enum_.rewind();
        try {
            init_globals();
            exec_harness();
        } catch (const PrunedRun&) {
        } catch (const ViolationAbort&) {
        } catch (const ReturnEx&) {
        }
    }

    void trace_event(const std::string& ev) {
        trace_.push_back(ev);
        while (static_cast<int>(trace_.size()) > opts_.trace_cap) trace_.pop_front();
    }

    int64_t choose(std::vector<int64_t> domain, int site) {
        int occ = site_occ_[site]++;
        return enum_.choose(std::move(domain),
                            "s" + std::to_string(site) + "#" + std::to_string(occ));
    }

    int32_t new_alloc(Base elem, int64_t size, bool dynamic, bool lazy) {
        Alloc a;
        a.elem = elem;
        a.size = size;
        a.dynamic = dynamic;
        a.default_lazy = lazy;
        allocs_.push_back(std::move(a));
        return static_cast<int32_t>(allocs_.size());
    }

    Alloc* alloc_of(const PtrVal& p) {
        if (p.alloc <= 0 || p.alloc > static_cast<int32_t>(allocs_.size())) return nullptr;
        return &allocs_[static_cast<size_t>(p.alloc) - 1];
    }

    void init_globals() {
        for (const auto& g : index_.globals) {
            if (g.decl.array_len >= 0) {
                int32_t id = new_alloc(g.decl.type.base, g.decl.array_len, false, false);
                globals_[g.decl.name] = Value::pointer(g.decl.type.base, PtrVal{id, 0});
            } else if (g.decl.type.ptr) {
                globals_[g.decl.name] = Value::pointer(g.decl.type.base, PtrVal{-1, 0});
            } else {
                int64_t v = g.decl.init ? g.decl.init->ival : 0;
                globals_[g.decl.name] =
                    Value::integer(g.decl.type.base, convert(v, g.decl.type.base));
            }
        }
    }

    int64_t config_value(const std::string& name) {
        auto ov = proof_.env.config_overrides.find(name);
        if (ov != proof_.env.config_overrides.end()) return ov->second;
        return index_.configs.at(name).value;
    }

    void exec_harness() {
        Frame frame;
        frame.fn = harness_.get();
        frames_.push_back(&frame);
        const auto& body = unrolled_.at("<harness>");
        for (const auto& s : body) {
            exec_stmt(*s);
            apply_ready_preconditions(frame);
        }
        end_frame(frame);
    }

    void end_frame(Frame& frame) {
        for (int32_t id : frame.stack_allocs) {
            Alloc& a = allocs_[static_cast<size_t>(id) - 1];
            if (a.state == Alloc::Alive) a.state = Alloc::Dead;
        }
        frames_.pop_back();
    }

    Frame& frame() { return *frames_.back(); }

    void mark_line(int line) {
        covered_lines_[frame().fn->file].insert(line);
    }

    // ---- conversions and checks -------------------------------------------

    static int64_t convert(int64_t v, Base b) {
        switch (b) {
            case Base::U8: return v & 0xFF;
            case Base::U32:
            case Base::Size: return v & kU32Max;
            case Base::I32: return static_cast<int32_t>(static_cast<uint64_t>(v));
            case Base::Void: break;
        }
        throw InternalError("convert to void");
    }

    void check_pass(int idx) {
        evaluated_.insert(instr_.checks[static_cast<size_t>(idx)].id());
    }

    [[noreturn]] void check_fail(int idx) {
        const PropertyCheck& c = instr_.checks[static_cast<size_t>(idx)];
        std::string id = c.id();
        evaluated_.insert(id);
        if (!violated_ids_.count(id)) {
            violated_ids_.insert(id);
            Violation v;
            v.check = c;
            v.witness.assignment = enum_.assignment();
            v.witness.trace.assign(trace_.begin(), trace_.end());
            violations_.push_back(std::move(v));
        }
        throw ViolationAbort{};
    }

    // Evaluates one property at `site`; `ok` decides pass/fail.  Missing
    // instrumentation (e.g. pointer checks behind an array site) is skipped.
    void check(int site, CheckKind kind, bool ok) {
        int idx = instr_.find(site, kind);
        if (idx < 0) return;
        if (ok)
            check_pass(idx);
        else
            check_fail(idx);
    }

    // The 5 pointer-deref properties; returns the alloc on success.
    Alloc* checked_ptr_access(int site, const PtrVal& p) {
        check(site, CheckKind::NullDeref, p.alloc != 0);
        Alloc* a = alloc_of(p);
        check(site, CheckKind::InvalidDeref, a != nullptr);
        check(site, CheckKind::DeallocatedDeref, a->state != Alloc::Freed);
        check(site, CheckKind::DeadObjectDeref, a->state != Alloc::Dead);
        check(site, CheckKind::OobPointerDeref, p.off >= 0 && p.off < a->size);
        return a;
    }

    int64_t read_cell(Alloc& a, int64_t idx, int32_t alloc_id) {
        Cell& c = a.cells[idx];
        if (c.st == Cell::Concrete) return c.v;
        if (c.st == Cell::Lazy || a.default_lazy) {
            int64_t v = enum_.choose(opts_.domains.domain_for(a.elem),
                                     "a" + std::to_string(alloc_id) + "[" +
                                         std::to_string(idx) + "]");
            c.st = Cell::Concrete;
            c.v = v;
            return v;
        }
        // Reading never-written non-lazy memory yields zero.
        c.st = Cell::Concrete;
        c.v = 0;
        return 0;
    }

    void write_cell(Alloc& a, int64_t idx, int64_t v) {
        a.cells[idx] = Cell{Cell::Concrete, convert(v, a.elem)};
    }

    // ---- expressions ------------------------------------------------------

    Value eval(const Expr& e) {
        switch (e.kind) {
            case ExprKind::IntLit: return Value::integer(Base::I32, e.ival);
            case ExprKind::NullLit: return Value::pointer(Base::U8, PtrVal{0, 0});
            case ExprKind::Ident: return eval_ident(e);
            case ExprKind::Unary: return eval_unary(e);
            case ExprKind::Binary: return eval_binary(e);
            case ExprKind::Index: {
                Value base = eval(*e.a);
                Value idx = eval(*e.b);
                if (e.a->kind == ExprKind::Ident && e.a->array_len >= 0) {
                    check(e.site, CheckKind::ArrayLowerBound, idx.i >= 0);
                    check(e.site, CheckKind::ArrayUpperBound, idx.i < e.a->array_len);
                    Alloc* a = alloc_of(base.p);
                    if (!a) throw InternalError("array storage missing");
                    return Value::integer(a->elem,
                                          read_cell(*a, base.p.off + idx.i, base.p.alloc));
                }
                PtrVal p{base.p.alloc, base.p.off + idx.i};
                Alloc* a = checked_ptr_access(e.site, p);
                return Value::integer(a->elem, read_cell(*a, p.off, p.alloc));
            }
            case ExprKind::Call: return eval_call(e);
        }
        throw InternalError("unreachable expression kind");
    }

    Value eval_ident(const Expr& e) {
        Frame& f = frame();
        auto it = f.vars.find(e.name);
        if (it != f.vars.end()) return it->second;
        auto g = globals_.find(e.name);
        if (g != globals_.end()) return g->second;
        auto c = index_.configs.find(e.name);
        if (c != index_.configs.end())
            return Value::integer(Base::I32, config_value(e.name));
        throw InternalError("unbound identifier at runtime: " + e.name);
    }

    Value eval_unary(const Expr& e) {
        if (e.un == UnOp::Deref) {
            Value v = eval(*e.a);
            Alloc* a = checked_ptr_access(e.site, v.p);
            return Value::integer(a->elem, read_cell(*a, v.p.off, v.p.alloc));
        }
        Value v = eval(*e.a);
        if (e.un == UnOp::Not) return Value::integer(Base::I32, v.i == 0 ? 1 : 0);
        return Value::integer(e.type.base, convert(-v.i, e.type.base));
    }

    Value eval_binary(const Expr& e) {
        if (e.bin == BinOp::LAnd) {
            Value a = eval(*e.a);
            if (a.i == 0) return Value::integer(Base::I32, 0);
            Value b = eval(*e.b);
            return Value::integer(Base::I32, b.i != 0 ? 1 : 0);
        }
        if (e.bin == BinOp::LOr) {
            Value a = eval(*e.a);
            if (a.i != 0) return Value::integer(Base::I32, 1);
            Value b = eval(*e.b);
            return Value::integer(Base::I32, b.i != 0 ? 1 : 0);
        }
        Value a = eval(*e.a);
        Value b = eval(*e.b);

        if (a.type.ptr && (e.bin == BinOp::Add || e.bin == BinOp::Sub)) {
            int64_t d = e.bin == BinOp::Add ? b.i : -b.i;
            return Value::pointer(a.type.base, PtrVal{a.p.alloc, a.p.off + d});
        }
        if (e.bin == BinOp::Eq || e.bin == BinOp::Ne) {
            bool eq;
            if (a.type.ptr || b.type.ptr)
                eq = a.p == b.p;
            else
                eq = a.i == b.i;
            return Value::integer(Base::I32, (e.bin == BinOp::Eq) == eq ? 1 : 0);
        }
        switch (e.bin) {
            case BinOp::Lt: return Value::integer(Base::I32, a.i < b.i);
            case BinOp::Le: return Value::integer(Base::I32, a.i <= b.i);
            case BinOp::Gt: return Value::integer(Base::I32, a.i > b.i);
            case BinOp::Ge: return Value::integer(Base::I32, a.i >= b.i);
            default: break;
        }

        int64_t r = 0;
        switch (e.bin) {
            case BinOp::Add:
            case BinOp::Sub:
            case BinOp::Mul: {
                r = e.bin == BinOp::Add ? a.i + b.i
                    : e.bin == BinOp::Sub ? a.i - b.i
                                          : a.i * b.i;
                if (e.type.base == Base::I32) {
                    CheckKind k = e.bin == BinOp::Add   ? CheckKind::SignedOverflowAdd
                                  : e.bin == BinOp::Sub ? CheckKind::SignedOverflowSub
                                                        : CheckKind::SignedOverflowMul;
                    check(e.site, k,
                          r >= std::numeric_limits<int32_t>::min() &&
                              r <= std::numeric_limits<int32_t>::max());
                }
                break;
            }
            case BinOp::Div:
            case BinOp::Mod:
                check(e.site, CheckKind::DivByZero, b.i != 0);
                r = e.bin == BinOp::Div ? a.i / b.i : a.i % b.i;
                break;
            case BinOp::Shl:
            case BinOp::Shr:
                check(e.site, CheckKind::ShiftDistanceNegative, b.i >= 0);
                check(e.site, CheckKind::ShiftDistanceTooLarge, b.i < 32);
                if (e.bin == BinOp::Shl)
                    r = static_cast<int64_t>((static_cast<uint64_t>(a.i) & kU32Max)
                                             << b.i);
                else
                    r = is_signed(e.type.base)
                            ? (a.i >> b.i)
                            : static_cast<int64_t>((static_cast<uint64_t>(a.i) & kU32Max) >>
                                                   b.i);
                break;
            default: throw InternalError("unreachable binary op");
        }
        return Value::integer(e.type.base, convert(r, e.type.base));
    }

    Value nondet(Base b, int site) {
        return Value::integer(b, convert(choose(opts_.domains.domain_for(b), site), b));
    }

    Value eval_call(const Expr& e) {
        const std::string& n = e.name;
        if (n == "nondet_u8") return nondet(Base::U8, e.site);
        if (n == "nondet_u32") return nondet(Base::U32, e.site);
        if (n == "nondet_i32") return nondet(Base::I32, e.site);
        if (n == "nondet_size") return nondet(Base::Size, e.site);
        if (n == "malloc") {
            Value sz = eval(*e.args[0]);
            int64_t elems = convert(sz.i, Base::Size);
            int32_t id = new_alloc(e.type.base, elems, true, false);
            return Value::pointer(e.type.base, PtrVal{id, 0});
        }

        std::vector<Value> args;
        for (const auto& a : e.args) args.push_back(eval(*a));

        auto fit = scope_fns_.find(n);
        if (fit == scope_fns_.end()) return model_call(e, args);

        const FunctionDef* fn = fit->second;
        if (++depth_ > opts_.recursion_cap)
            throw InputError("recursion deeper than the depth cap in '" + n + "'");
        Frame f;
        f.fn = fn;
        for (size_t i = 0; i < fn->params.size(); ++i) {
            Value v = args[i];
            if (fn->params[i].type.is_int())
                v = Value::integer(fn->params[i].type.base,
                                   convert(v.i, fn->params[i].type.base));
            f.vars[fn->params[i].name] = v;
        }
        frames_.push_back(&f);
        Value ret;
        try {
            for (const auto& s : unrolled_.at(n)) exec_stmt(*s);
        } catch (const ReturnEx& r) {
            if (r.has_value) ret = r.value;
        } catch (...) {
            end_frame(f);
            --depth_;
            throw;
        }
        end_frame(f);
        --depth_;
        if (fn->name == proof_.scope.entry && frames_.size() == 1 && !fn->ret.is_void() &&
            !fn->ret.ptr)
            entry_returns_.insert(ret.i);
        return ret;
    }

    Value model_call(const Expr& e, std::vector<Value>& args) {
        auto mit = proof_.env.function_models.find(e.name);
        if (mit == proof_.env.function_models.end())
            throw InputError("call to unmodeled out-of-scope function '" + e.name + "'");
        const FunctionModel& m = mit->second;

        // Havoc: the callee may have overwritten anything reachable through
        // these pointer parameters.
        const FunctionDef* def = index_.resolve(e.name, "");
        for (const auto& hp : m.havoc_params) {
            if (!def) break;
            for (size_t i = 0; i < def->params.size() && i < args.size(); ++i) {
                if (def->params[i].name != hp || !args[i].type.ptr) continue;
                if (Alloc* a = alloc_of(args[i].p)) {
                    a->cells.clear();
                    a->default_lazy = true;
                }
            }
        }

        Value ret;
        if (!m.ret.type.is_void()) {
            if (!m.ret.type.ptr) {
                if (opts_.pin && opts_.pin->subject == "ret_of(" + e.name + ")")
                    ret = Value::integer(m.ret.type.base,
                                         convert(opts_.pin->value, m.ret.type.base));
                else
                    ret = nondet(m.ret.type.base, e.site);
            } else {
                int64_t size = m.ret.size_fixed
                                   ? m.ret.size_lo
                                   : choose(DomainConfig::size_range(m.ret.size_lo,
                                                                     m.ret.size_hi),
                                            e.site);
                int32_t id = new_alloc(m.ret.type.base, size, true, true);
                ret = Value::pointer(m.ret.type.base, PtrVal{id, 0});
            }
            // Return-value preconditions act as assumptions at the call.
            for (const auto& pre : proof_.env.preconditions) {
                auto f = ret_of_subject(pre.subjects.at(0));
                if (!f || *f != e.name) continue;
                if (!eval_term_int(pre, ret.i)) throw PrunedRun{};
            }
        }
        trace_event("model " + e.name + " -> " +
                    (m.ret.type.is_void() ? std::string("void")
                     : m.ret.type.ptr    ? std::string("ptr")
                                         : std::to_string(ret.i)));
        return ret;
    }

    bool rel_holds(Rel r, int64_t a, int64_t b) {
        switch (r) {
            case Rel::Lt: return a < b;
            case Rel::Le: return a <= b;
            case Rel::Gt: return a > b;
            case Rel::Ge: return a >= b;
            case Rel::Eq: return a == b;
            case Rel::Ne: return a != b;
        }
        return false;
    }

    bool eval_term_int(const PreconditionTerm& t, int64_t subject_value) {
        switch (t.category) {
            case PreCat::VariableConstant:
                return rel_holds(t.rel, subject_value, t.constant.value_or(0));
            default:
                throw InternalError("unsupported ret_of precondition category");
        }
    }

    // Applies env preconditions whose subjects have all become defined in the
    // harness frame (runs after every top-level harness statement).
    void apply_ready_preconditions(Frame& f) {
        for (size_t i = 0; i < proof_.env.preconditions.size(); ++i) {
            if (pre_applied_[i]) continue;
            const PreconditionTerm& t = proof_.env.preconditions[i];
            if (ret_of_subject(t.subjects.at(0))) {
                pre_applied_[i] = true; // handled at model calls
                continue;
            }
            bool ready = true;
            for (const auto& s : t.subjects) ready = ready && f.vars.count(s) > 0;
            if (!ready) continue;
            pre_applied_[i] = true;
            if (!precondition_holds(t, f)) throw PrunedRun{};
        }
    }

    bool precondition_holds(const PreconditionTerm& t, Frame& f) {
        const Value& a = f.vars.at(t.subjects.at(0));
        switch (t.category) {
            case PreCat::PointerNotNull:
                return a.p.alloc != 0;
            case PreCat::VariableConstant:
                return rel_holds(t.rel, a.i, t.constant.value_or(0));
            case PreCat::VariableVariable: {
                const Value& b = f.vars.at(t.subjects.at(1));
                return rel_holds(t.rel, a.i, b.i);
            }
            case PreCat::PointerOffset: {
                const Value& b = f.vars.at(t.subjects.at(1));
                if (a.p.alloc != b.p.alloc) return false;
                int64_t want = b.p.off + t.constant.value_or(0);
                return rel_holds(t.rel, a.p.off, want);
            }
        }
        return false;
    }

    // ---- statements -------------------------------------------------------

    void exec_block(const std::vector<StmtPtr>& body) {
        for (const auto& s : body) exec_stmt(*s);
    }

    void exec_stmt(const Stmt& s) {
        if (s.kind != StmtKind::SaturationProbe) mark_line(s.line);
        switch (s.kind) {
            case StmtKind::Decl: {
                Value v;
                if (s.decl.array_len >= 0) {
                    int32_t id = new_alloc(s.decl.type.base, s.decl.array_len, false, false);
                    frame().stack_allocs.push_back(id);
                    v = Value::pointer(s.decl.type.base, PtrVal{id, 0});
                } else if (s.decl.init) {
                    if (opts_.pin && frames_.size() == 1 &&
                        opts_.pin->subject == s.decl.name &&
                        s.decl.init->kind == ExprKind::Call &&
                        s.decl.init->name.rfind("nondet_", 0) == 0) {
                        frame().vars[s.decl.name] = Value::integer(
                            s.decl.type.base, convert(opts_.pin->value, s.decl.type.base));
                        trace_event(s.decl.name + " pinned to " +
                                    std::to_string(opts_.pin->value));
                        return;
                    }
                    v = eval(*s.decl.init);
                    if (s.decl.type.is_int())
                        v = Value::integer(s.decl.type.base, convert(v.i, s.decl.type.base));
                    else if (v.type.ptr || s.decl.init->kind == ExprKind::NullLit)
                        v.type = s.decl.type;
                } else if (s.decl.type.ptr) {
                    v = Value::pointer(s.decl.type.base, PtrVal{-1, 0});
                } else {
                    v = Value::integer(s.decl.type.base, 0);
                }
                frame().vars[s.decl.name] = v;
                if (!v.type.ptr)
                    trace_event(s.decl.name + " = " + std::to_string(v.i) + " @" +
                                frame().fn->file + ":" + std::to_string(s.line));
                return;
            }
            case StmtKind::Assign: {
                Value v = eval(*s.rhs);
                store(*s.lhs, v);
                return;
            }
            case StmtKind::If: {
                Value c = eval(*s.cond);
                if (c.i != 0)
                    exec_block(s.body);
                else
                    exec_block(s.els);
                return;
            }
            case StmtKind::While:
            case StmtKind::For:
                throw InternalError("loop survived unrolling");
            case StmtKind::Return: {
                ReturnEx r;
                if (s.cond) {
                    r.value = eval(*s.cond);
                    r.has_value = true;
                }
                throw r;
            }
            case StmtKind::Assume: {
                // Harness assumptions over a pinned symbol are suspended: the
                // pin replays a concrete caller context, which overrides the
                // synthetic input range.
                if (opts_.pin && frames_.size() == 1 && mentions(*s.cond, opts_.pin->subject))
                    return;
                Value c = eval(*s.cond);
                if (c.i == 0) throw PrunedRun{};
                return;
            }
            case StmtKind::Assert: {
                Value c = eval(*s.cond);
                check(s.site, CheckKind::UserAssert, c.i != 0);
                return;
            }
            case StmtKind::Free: {
                Value p = eval(*s.cond);
                if (p.p.alloc == 0) {
                    // free(NULL) is a no-op; all three properties hold.
                    for (CheckKind k : {CheckKind::FreeOffsetZero, CheckKind::FreeDynamic,
                                        CheckKind::DoubleFree}) {
                        int idx = instr_.find(s.site, k);
                        if (idx >= 0) check_pass(idx);
                    }
                    return;
                }
                Alloc* a = alloc_of(p.p);
                check(s.site, CheckKind::FreeOffsetZero, a != nullptr && p.p.off == 0);
                check(s.site, CheckKind::FreeDynamic, a != nullptr && a->dynamic);
                check(s.site, CheckKind::DoubleFree, a->state == Alloc::Alive);
                a->state = Alloc::Freed;
                return;
            }
            case StmtKind::Memcpy: {
                Value dst = eval(*s.lhs);
                Value src = eval(*s.rhs);
                Value n = eval(*s.n);
                int64_t len = convert(n.i, Base::Size);
                Alloc* sa = alloc_of(src.p);
                Alloc* da = alloc_of(dst.p);
                bool src_ok = len == 0 ||
                              (src.p.alloc > 0 && sa && sa->state == Alloc::Alive &&
                               src.p.off >= 0 && src.p.off + len <= sa->size);
                check(s.site, CheckKind::MemcpySrcReadable, src_ok);
                bool dst_ok = len == 0 ||
                              (dst.p.alloc > 0 && da && da->state == Alloc::Alive &&
                               dst.p.off >= 0 && dst.p.off + len <= da->size);
                check(s.site, CheckKind::MemcpyDstWriteable, dst_ok);
                bool overlap = len > 0 && dst.p.alloc == src.p.alloc &&
                               dst.p.off < src.p.off + len && src.p.off < dst.p.off + len;
                check(s.site, CheckKind::MemcpyOverlap, !overlap);
                for (int64_t k = 0; k < len; ++k)
                    write_cell(*da, dst.p.off + k, read_cell(*sa, src.p.off + k, src.p.alloc));
                return;
            }
            case StmtKind::Memset: {
                Value dst = eval(*s.lhs);
                Value val = eval(*s.rhs);
                Value n = eval(*s.n);
                int64_t len = convert(n.i, Base::Size);
                Alloc* da = alloc_of(dst.p);
                bool dst_ok = len == 0 ||
                              (dst.p.alloc > 0 && da && da->state == Alloc::Alive &&
                               dst.p.off >= 0 && dst.p.off + len <= da->size);
                check(s.site, CheckKind::MemsetDstWriteable, dst_ok);
                for (int64_t k = 0; k < len; ++k) write_cell(*da, dst.p.off + k, val.i);
                return;
            }
            case StmtKind::CallStmt:
                eval(*s.call);
                return;
            case StmtKind::SaturationProbe:
                saturated_.insert(s.loop_id);
                throw PrunedRun{};
        }
    }

    void store(const Expr& lhs, const Value& v) {
        switch (lhs.kind) {
            case ExprKind::Ident: {
                Frame& f = frame();
                Value stored = v;
                TypeRef target;
                auto it = f.vars.find(lhs.name);
                std::map<std::string, Value>* where = nullptr;
                if (it != f.vars.end()) {
                    target = it->second.type;
                    where = &f.vars;
                } else if (globals_.count(lhs.name)) {
                    target = globals_.at(lhs.name).type;
                    where = &globals_;
                } else {
                    throw InternalError("store to unbound identifier " + lhs.name);
                }
                if (target.is_int())
                    stored = Value::integer(target.base, convert(v.i, target.base));
                else
                    stored.type = target;
                (*where)[lhs.name] = stored;
                if (!stored.type.ptr)
                    trace_event(lhs.name + " = " + std::to_string(stored.i) + " @" +
                                frame().fn->file + ":" + std::to_string(lhs.line));
                return;
            }
            case ExprKind::Index: {
                Value base = eval(*lhs.a);
                Value idx = eval(*lhs.b);
                if (lhs.a->kind == ExprKind::Ident && lhs.a->array_len >= 0) {
                    check(lhs.site, CheckKind::ArrayLowerBound, idx.i >= 0);
                    check(lhs.site, CheckKind::ArrayUpperBound, idx.i < lhs.a->array_len);
                    Alloc* a = alloc_of(base.p);
                    if (!a) throw InternalError("array storage missing");
                    write_cell(*a, base.p.off + idx.i, v.i);
                    return;
                }
                PtrVal p{base.p.alloc, base.p.off + idx.i};
                Alloc* a = checked_ptr_access(lhs.site, p);
                write_cell(*a, p.off, v.i);
                return;
            }
            case ExprKind::Unary: {
                Value ptr = eval(*lhs.a);
                Alloc* a = checked_ptr_access(lhs.site, ptr.p);
                write_cell(*a, ptr.p.off, v.i);
                return;
            }
            default:
                throw InternalError("bad lvalue kind at runtime");
        }
    }
};

} // namespace

VerificationReport verify(const UnitProof& proof, const ProjectIndex& index,
                          const EngineOptions& opts) {
    Engine eng(proof, index, opts);
    return eng.run();
}

VerificationReport verify_pinned(const UnitProof& proof, const ProjectIndex& index,
                                 const EngineOptions& opts, const PinnedValue& pin) {
    EngineOptions pinned = opts;
    pinned.pin = pin;
    return verify(proof, index, pinned);
}

} // namespace soup
