#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pnsmc/net.hpp"

namespace pnsmc {

/// Value of an observed variable at one sample.
using ObservedValue = std::variant<std::int64_t, bool, double>;

enum class ValueKind { Int, Bool, Real };

ValueKind kind_of(const ObservedValue& v);
double as_real(const ObservedValue& v);  // numeric view; throws EvalError for Bool
std::string to_string(const ObservedValue& v);

/// Variable names and kinds shared by every sample of a trace.
struct TraceSchema {
    std::vector<std::string> names;
    std::vector<ValueKind> kinds;

    std::size_t size() const { return names.size(); }
    std::optional<std::size_t> index_of(std::string_view name) const;
    /// index_of that throws EvalError naming the variable when missing.
    std::size_t require(std::string_view name) const;
};

/// Read-only view of one sample's variable assignment.
class ObservedState {
public:
    ObservedState(const TraceSchema& schema, std::span<const ObservedValue> values)
        : schema_(&schema), values_(values) {}

    const TraceSchema& schema() const { return *schema_; }
    std::size_t size() const { return values_.size(); }
    const ObservedValue& at(std::size_t index) const { return values_[index]; }
    /// Lookup by name; throws EvalError for unknown variables.
    const ObservedValue& at(std::string_view name) const { return values_[schema_->require(name)]; }

private:
    const TraceSchema* schema_;
    std::span<const ObservedValue> values_;
};

struct TimedSample {
    double time = 0.0;
    std::vector<ObservedValue> values;
};

/// Finite timed trace: samples with nondecreasing timestamps, the first at
/// t = 0, all sharing one schema.
struct ExecutionTrace {
    std::shared_ptr<const TraceSchema> schema;
    std::vector<TimedSample> samples;

    std::size_t length() const { return samples.size(); }
    double time(std::size_t k) const { return samples[k].time; }
    ObservedState state(std::size_t k) const {
        return ObservedState(*schema, std::span<const ObservedValue>(samples[k].values));
    }
};

struct DerivedVariable {
    std::string name;
    ValueKind kind = ValueKind::Int;
    std::function<ObservedValue(const Marking&)> fn;
};

/// Reward class: states matching the predicate accrue time into the
/// accumulator variable reward_<name>. The classes of one observer must be
/// mutually exclusive and exhaustive; this is checked at every sample.
struct RewardClass {
    std::string name;
    std::function<bool(const ObservedState&)> predicate;
};

/// Maps markings to observed states: a list of derived variables followed by
/// one Real accumulator variable reward_<class> per reward class.
class Observer {
public:
    Observer() = default;
    Observer(std::vector<DerivedVariable> variables, std::vector<RewardClass> classes);

    const std::shared_ptr<const TraceSchema>& schema() const { return schema_; }
    std::size_t num_variables() const { return variables_.size(); }
    std::size_t num_classes() const { return classes_.size(); }
    const std::vector<DerivedVariable>& variables() const { return variables_; }
    const std::vector<RewardClass>& classes() const { return classes_; }

    /// Evaluates the derived variables into out[0..num_variables).
    void observe(const Marking& m, std::span<ObservedValue> out) const;

    /// Index of the unique class containing the state; throws ModelError
    /// unless exactly one class predicate holds.
    std::size_t classify(const ObservedState& state, double time) const;

private:
    std::vector<DerivedVariable> variables_;
    std::vector<RewardClass> classes_;
    std::shared_ptr<const TraceSchema> schema_;
};

/// When to emit samples: on a periodic tick, on firings of chosen rules, on
/// any firing, or any combination. A sample at t = 0 is always emitted.
struct TemporalResolution {
    std::optional<double> tick;           // period, > 0
    bool on_any_firing = false;
    std::vector<std::uint32_t> on_rules;  // observed rule ids

    static TemporalResolution every(double dt) { return {dt, false, {}}; }
    static TemporalResolution any_firing() { return {std::nullopt, true, {}}; }
    static TemporalResolution rule_firing(std::vector<std::uint32_t> ids) {
        return {std::nullopt, false, std::move(ids)};
    }
    bool observes_firing(std::uint32_t rule) const;
};

/// Streaming simulation driver. Runs the net from its initial marking to the
/// horizon, emitting one sample at t = 0 and one per temporal-event
/// occurrence with time <= horizon. When a firing and a tick coincide the
/// firing sample is emitted first; both show the post-firing state. After an
/// absorbing marking is reached, ticks keep firing until the horizon.
/// Rewards integrate piecewise-constantly, classifying each inter-sample
/// interval by its left sample. on_sample returns false to stop early.
void simulate(const Net& net, const Observer& observer, const TemporalResolution& resolution,
              double horizon, RandomStream& stream,
              const std::function<bool(double, std::span<const ObservedValue>)>& on_sample);

/// simulate() collecting the full trace.
ExecutionTrace run_trace(const Net& net, const Observer& observer,
                         const TemporalResolution& resolution, double horizon,
                         RandomStream& stream);

/// Trace restricted to the given variables (kept in schema order). Unknown
/// names raise EvalError.
ExecutionTrace project(const ExecutionTrace& trace, std::span<const std::string> variables);

/// First k+1 samples. Throws std::out_of_range if k >= length.
ExecutionTrace prefix(const ExecutionTrace& trace, std::size_t k);

/// Samples from index k on. Throws std::out_of_range if k >= length.
ExecutionTrace suffix(const ExecutionTrace& trace, std::size_t k);

/// CSV with header time,<var1>,<var2>,...; booleans as 0/1, reals with nine
/// significant digits.
void write_csv(const ExecutionTrace& trace, std::ostream& out);

}  // namespace pnsmc
