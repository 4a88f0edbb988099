#include "pnsmc/monitor.hpp"

#include <cmath>
#include <string>

#include "pnsmc/errors.hpp"

namespace pnsmc {

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::True: return "true";
        case Verdict::False: return "false";
        default: return "undecided";
    }
}

namespace {

bool is_true(const FormulaPtr& f) { return f->kind() == FormulaKind::True; }
bool is_false(const FormulaPtr& f) { return f->kind() == FormulaKind::False; }

FormulaPtr fold_not(FormulaPtr f) {
    if (is_true(f)) return Formula::make_false();
    if (is_false(f)) return Formula::make_true();
    return Formula::negation(std::move(f));
}

FormulaPtr fold_and(FormulaPtr l, FormulaPtr r) {
    if (is_false(l) || is_false(r)) return Formula::make_false();
    if (is_true(l)) return r;
    if (is_true(r)) return l;
    return Formula::conjunction(std::move(l), std::move(r));
}

FormulaPtr fold_or(FormulaPtr l, FormulaPtr r) {
    if (is_true(l) || is_true(r)) return Formula::make_true();
    if (is_false(l)) return r;
    if (is_false(r)) return l;
    return Formula::disjunction(std::move(l), std::move(r));
}

FormulaPtr fold_implies(FormulaPtr l, FormulaPtr r) {
    if (is_false(l) || is_true(r)) return Formula::make_true();
    if (is_true(l)) return r;
    if (is_false(r)) return fold_not(std::move(l));
    return Formula::implication(std::move(l), std::move(r));
}

Bound minus(const Bound& b, double dt) {
    Bound out = b;
    out.time -= dt;
    return out;
}

// Advances the pending formula's clock by dt: every live temporal operator
// (reachable through Boolean connectives only — nested operators have not
// started their own clocks yet) has its time bound reduced. A bound that
// drops below zero leaves no sample that could still witness the operator,
// so an until collapses to false and an invariant to true; a bound of
// exactly zero stays live for zero-dwell samples. Step bounds count samples
// and are untouched by elapsed time.
FormulaPtr elapse(const FormulaPtr& f, double dt) {
    switch (f->kind()) {
        case FormulaKind::True:
        case FormulaKind::False:
        case FormulaKind::Atom:
            return f;
        case FormulaKind::Not:
            return fold_not(elapse(f->lhs(), dt));
        case FormulaKind::And:
            return fold_and(elapse(f->lhs(), dt), elapse(f->rhs(), dt));
        case FormulaKind::Or:
            return fold_or(elapse(f->lhs(), dt), elapse(f->rhs(), dt));
        case FormulaKind::Implies:
            return fold_implies(elapse(f->lhs(), dt), elapse(f->rhs(), dt));
        case FormulaKind::Until: {
            if (f->bound().kind != Bound::Kind::Time) return f;
            Bound b = minus(f->bound(), dt);
            if (b.time < 0.0) return Formula::make_false();
            return Formula::until(f->lhs(), f->rhs(), b);
        }
        case FormulaKind::Eventually: {
            if (f->bound().kind != Bound::Kind::Time) return f;
            Bound b = minus(f->bound(), dt);
            if (b.time < 0.0) return Formula::make_false();
            return Formula::eventually(f->lhs(), b);
        }
        case FormulaKind::Globally: {
            if (f->bound().kind != Bound::Kind::Time) return f;
            Bound b = minus(f->bound(), dt);
            if (b.time < 0.0) return Formula::make_true();
            return Formula::globally(f->lhs(), b);
        }
    }
    return f;
}

// True when the operator may still be deferred to a later sample: time
// bounds always (elapse handles expiry), step bounds only with budget left.
bool has_next_budget(const Bound& b) {
    return b.kind == Bound::Kind::Time || b.steps >= 1;
}

Bound next_bound(const Bound& b) {
    if (b.kind == Bound::Kind::Time) return b;  // elapse subtracts the dwell later
    Bound out = b;
    out.steps -= 1;
    return out;
}

// End-of-trace closure: no further sample exists, so pending untils and
// eventuallys have no witness (false) and pending invariants hold (true).
FormulaPtr close_out(const FormulaPtr& f) {
    switch (f->kind()) {
        case FormulaKind::Not:
            return fold_not(close_out(f->lhs()));
        case FormulaKind::And:
            return fold_and(close_out(f->lhs()), close_out(f->rhs()));
        case FormulaKind::Or:
            return fold_or(close_out(f->lhs()), close_out(f->rhs()));
        case FormulaKind::Implies:
            return fold_implies(close_out(f->lhs()), close_out(f->rhs()));
        case FormulaKind::Until:
        case FormulaKind::Eventually:
            return Formula::make_false();
        case FormulaKind::Globally:
            return Formula::make_true();
        default:
            return f;
    }
}

}  // namespace

Monitor::Monitor(FormulaPtr formula, std::shared_ptr<const TraceSchema> schema)
    : formula_(std::move(formula)), schema_(std::move(schema)) {
    if (!formula_) throw EvalError("monitor needs a formula");
    if (!schema_) throw EvalError("monitor needs a trace schema");

    // Bind every atom node to its schema slot up front.
    auto bind = [&](const Formula& node, auto&& self) -> void {
        if (node.kind() == FormulaKind::Atom) {
            const Atom& a = node.atom();
            std::size_t slot = schema_->require(a.name);
            ValueKind kind = schema_->kinds[slot];
            if (a.op) {
                if (kind == ValueKind::Bool) {
                    throw EvalError("variable '" + a.name +
                                    "' is Boolean and cannot be compared with a number");
                }
            } else if (kind != ValueKind::Bool) {
                throw EvalError("variable '" + a.name +
                                "' is numeric and cannot be used as a bare proposition");
            }
            bindings_.emplace(&node, slot);
            return;
        }
        if (node.lhs()) self(*node.lhs(), self);
        if (node.rhs()) self(*node.rhs(), self);
    };
    bind(*formula_, bind);
    residual_ = formula_;
}

FormulaPtr Monitor::eval_atom(const Formula& node, std::span<const ObservedValue> values) const {
    const std::size_t slot = bindings_.at(&node);
    const Atom& a = node.atom();
    const ObservedValue& v = values[slot];
    if (!a.op) {
        return std::get<bool>(v) ? Formula::make_true() : Formula::make_false();
    }
    const double x = as_real(v);
    bool r = false;
    switch (*a.op) {
        case CompareOp::Lt: r = x < a.constant; break;
        case CompareOp::Le: r = x <= a.constant; break;
        case CompareOp::Eq: r = x == a.constant; break;
        case CompareOp::Ne: r = x != a.constant; break;
        case CompareOp::Ge: r = x >= a.constant; break;
        case CompareOp::Gt: r = x > a.constant; break;
    }
    return r ? Formula::make_true() : Formula::make_false();
}

// One progression step: decide everything the new sample decides and
// express what remains as obligations on the next sample. An until unrolls
// to "rhs holds now, or lhs holds now and the until (with one less sample
// of budget for step bounds, or its clock still running for time bounds)
// holds from the next sample on".
FormulaPtr Monitor::progress(const FormulaPtr& f, std::span<const ObservedValue> values) const {
    switch (f->kind()) {
        case FormulaKind::True:
        case FormulaKind::False:
            return f;
        case FormulaKind::Atom:
            return eval_atom(*f, values);
        case FormulaKind::Not:
            return fold_not(progress(f->lhs(), values));
        case FormulaKind::And:
            return fold_and(progress(f->lhs(), values), progress(f->rhs(), values));
        case FormulaKind::Or:
            return fold_or(progress(f->lhs(), values), progress(f->rhs(), values));
        case FormulaKind::Implies:
            return fold_implies(progress(f->lhs(), values), progress(f->rhs(), values));
        case FormulaKind::Until: {
            FormulaPtr now = progress(f->rhs(), values);
            if (is_true(now)) return now;
            FormulaPtr hold = progress(f->lhs(), values);
            FormulaPtr later = has_next_budget(f->bound())
                                   ? Formula::until(f->lhs(), f->rhs(), next_bound(f->bound()))
                                   : Formula::make_false();
            return fold_or(std::move(now), fold_and(std::move(hold), std::move(later)));
        }
        case FormulaKind::Eventually: {
            FormulaPtr now = progress(f->lhs(), values);
            if (is_true(now)) return now;
            FormulaPtr later = has_next_budget(f->bound())
                                   ? Formula::eventually(f->lhs(), next_bound(f->bound()))
                                   : Formula::make_false();
            return fold_or(std::move(now), std::move(later));
        }
        case FormulaKind::Globally: {
            FormulaPtr now = progress(f->lhs(), values);
            if (is_false(now)) return now;
            FormulaPtr later = has_next_budget(f->bound())
                                   ? Formula::globally(f->lhs(), next_bound(f->bound()))
                                   : Formula::make_true();
            return fold_and(std::move(now), std::move(later));
        }
    }
    return f;
}

Verdict Monitor::feed(double time, std::span<const ObservedValue> values) {
    if (conclusive()) return verdict_;
    if (!std::isfinite(time)) throw EvalError("sample timestamp must be finite");
    if (fed_ > 0) {
        if (time < last_time_) {
            throw EvalError("samples out of order: t = " + std::to_string(time) + " after t = " +
                            std::to_string(last_time_));
        }
        residual_ = elapse(residual_, time - last_time_);
    }
    last_time_ = time;
    ++fed_;
    residual_ = progress(residual_, values);
    if (is_true(residual_)) {
        verdict_ = Verdict::True;
    } else if (is_false(residual_)) {
        verdict_ = Verdict::False;
    }
    return verdict_;
}

Verdict Monitor::feed(const TimedSample& sample) {
    return feed(sample.time, std::span<const ObservedValue>(sample.values));
}

Verdict Monitor::finish() {
    if (conclusive()) return verdict_;
    if (fed_ == 0) throw EvalError("finish() before any sample was fed");
    residual_ = close_out(residual_);
    verdict_ = is_true(residual_) ? Verdict::True : Verdict::False;
    return verdict_;
}

Verdict monitor_trace(const FormulaPtr& formula, const ExecutionTrace& trace) {
    Monitor m(formula, trace.schema);
    for (const TimedSample& s : trace.samples) {
        if (m.feed(s) != Verdict::Undecided) return m.verdict();
    }
    return m.finish();
}

}  // namespace pnsmc
