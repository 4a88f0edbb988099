#pragma once

#include <memory>
#include <span>
#include <unordered_map>

#include "pnsmc/bltl.hpp"
#include "pnsmc/trace.hpp"

namespace pnsmc {

/// Three-valued monitoring verdict. A conclusive verdict (True/False) is
/// final: further samples never change it.
enum class Verdict : unsigned char { Undecided, True, False };

std::string_view to_string(Verdict v);

/// Incremental property monitor over one trace, implemented by formula
/// progression: each sample first elapses the pending formula's live time
/// bounds by the step's duration (a bound falling below zero collapses its
/// operator), then rewrites atoms to their truth values in the new sample
/// and unrolls the temporal operators by one step.
///
/// After any prefix, a conclusive verdict equals the offline evaluation of
/// the original formula on every extension of that prefix; finish() closes
/// out a still-pending formula with end-of-trace semantics (an until with
/// no witness is false), so verdict() then equals evaluate(formula, trace, 0).
///
/// Single-owner mutable state: use one Monitor per trace per thread.
class Monitor {
public:
    /// Binds every atom to its schema slot. Throws EvalError for unknown
    /// variable names or a comparison applied to a Boolean variable.
    Monitor(FormulaPtr formula, std::shared_ptr<const TraceSchema> schema);

    /// Consumes the next sample (values laid out per the schema). Returns
    /// the verdict after this sample. Throws EvalError if time goes
    /// backwards; equal timestamps are legal (zero-dwell samples).
    Verdict feed(double time, std::span<const ObservedValue> values);
    Verdict feed(const TimedSample& sample);

    /// End-of-trace closure: pending untils become false, pending
    /// invariants true. Idempotent; requires at least one fed sample.
    Verdict finish();

    Verdict verdict() const { return verdict_; }
    bool conclusive() const { return verdict_ != Verdict::Undecided; }
    std::size_t samples_fed() const { return fed_; }

    const FormulaPtr& formula() const { return formula_; }
    const std::shared_ptr<const TraceSchema>& schema() const { return schema_; }

private:
    FormulaPtr eval_atom(const Formula& node, std::span<const ObservedValue> values) const;
    FormulaPtr progress(const FormulaPtr& f, std::span<const ObservedValue> values) const;

    FormulaPtr formula_;
    std::shared_ptr<const TraceSchema> schema_;
    std::unordered_map<const Formula*, std::size_t> bindings_;
    FormulaPtr residual_;
    Verdict verdict_ = Verdict::Undecided;
    double last_time_ = 0.0;
    std::size_t fed_ = 0;
};

/// Offline check via the monitor: feeds the whole trace, then finish().
Verdict monitor_trace(const FormulaPtr& formula, const ExecutionTrace& trace);

}  // namespace pnsmc
