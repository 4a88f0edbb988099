#include "pnsmc/trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <unordered_set>

#include "pnsmc/errors.hpp"

namespace pnsmc {

ValueKind kind_of(const ObservedValue& v) {
    switch (v.index()) {
        case 0: return ValueKind::Int;
        case 1: return ValueKind::Bool;
        default: return ValueKind::Real;
    }
}

double as_real(const ObservedValue& v) {
    if (std::holds_alternative<std::int64_t>(v)) {
        return static_cast<double>(std::get<std::int64_t>(v));
    }
    if (std::holds_alternative<double>(v)) return std::get<double>(v);
    throw EvalError("Boolean value used where a number is required");
}

std::string to_string(const ObservedValue& v) {
    if (std::holds_alternative<std::int64_t>(v)) return std::to_string(std::get<std::int64_t>(v));
    if (std::holds_alternative<bool>(v)) return std::get<bool>(v) ? "true" : "false";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", std::get<double>(v));
    return buf;
}

std::optional<std::size_t> TraceSchema::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return i;
    }
    return std::nullopt;
}

std::size_t TraceSchema::require(std::string_view name) const {
    if (auto i = index_of(name)) return *i;
    throw EvalError("unknown variable '" + std::string(name) + "'");
}

Observer::Observer(std::vector<DerivedVariable> variables, std::vector<RewardClass> classes)
    : variables_(std::move(variables)), classes_(std::move(classes)) {
    auto schema = std::make_shared<TraceSchema>();
    std::unordered_set<std::string> seen;
    for (const DerivedVariable& v : variables_) {
        if (!v.fn) throw std::invalid_argument("derived variable '" + v.name + "' has no function");
        if (!seen.insert(v.name).second) {
            throw std::invalid_argument("duplicate observed variable '" + v.name + "'");
        }
        schema->names.push_back(v.name);
        schema->kinds.push_back(v.kind);
    }
    for (const RewardClass& c : classes_) {
        if (!c.predicate) throw std::invalid_argument("reward class '" + c.name + "' has no predicate");
        std::string name = "reward_" + c.name;
        if (!seen.insert(name).second) {
            throw std::invalid_argument("duplicate observed variable '" + name + "'");
        }
        schema->names.push_back(std::move(name));
        schema->kinds.push_back(ValueKind::Real);
    }
    schema_ = std::move(schema);
}

void Observer::observe(const Marking& m, std::span<ObservedValue> out) const {
    for (std::size_t i = 0; i < variables_.size(); ++i) {
        out[i] = variables_[i].fn(m);
    }
}

std::size_t Observer::classify(const ObservedState& state, double time) const {
    std::size_t match = classes_.size();
    for (std::size_t i = 0; i < classes_.size(); ++i) {
        if (classes_[i].predicate(state)) {
            if (match != classes_.size()) {
                throw ModelError("reward classes '" + classes_[match].name + "' and '" +
                                 classes_[i].name + "' both match the state at t = " +
                                 std::to_string(time));
            }
            match = i;
        }
    }
    if (match == classes_.size()) {
        throw ModelError("no reward class matches the state at t = " + std::to_string(time));
    }
    return match;
}

bool TemporalResolution::observes_firing(std::uint32_t rule) const {
    if (on_any_firing) return true;
    return std::find(on_rules.begin(), on_rules.end(), rule) != on_rules.end();
}

void simulate(const Net& net, const Observer& observer, const TemporalResolution& resolution,
              double horizon, RandomStream& stream,
              const std::function<bool(double, std::span<const ObservedValue>)>& on_sample) {
    if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
        throw std::invalid_argument("horizon must be finite and >= 0");
    }
    if (resolution.tick && !(*resolution.tick > 0.0 && std::isfinite(*resolution.tick))) {
        throw std::invalid_argument("tick period must be finite and > 0");
    }

    const std::size_t nvars = observer.num_variables();
    const std::size_t ncls = observer.num_classes();
    const TraceSchema& schema = *observer.schema();

    std::vector<ObservedValue> values(schema.size());
    std::vector<double> rewards(ncls, 0.0);
    std::span<ObservedValue> vars(values.data(), nvars);

    Marking marking = net.initial;
    double now = 0.0;
    bool vars_dirty = false;
    observer.observe(marking, vars);

    double last_emit = 0.0;
    std::size_t last_class = 0;

    // Emits a sample at `time`, first charging the interval since the last
    // emitted sample to that sample's reward class.
    auto emit = [&](double time) -> bool {
        if (vars_dirty) {
            observer.observe(marking, vars);
            vars_dirty = false;
        }
        if (ncls > 0) {
            rewards[last_class] += time - last_emit;
            for (std::size_t c = 0; c < ncls; ++c) values[nvars + c] = rewards[c];
            last_class = observer.classify(ObservedState(schema, values), time);
        }
        last_emit = time;
        return on_sample(time, values);
    };

    if (ncls > 0) {
        for (std::size_t c = 0; c < ncls; ++c) values[nvars + c] = 0.0;
    }
    if (!emit(0.0)) return;

    const bool has_tick = resolution.tick.has_value();
    const double tick_dt = has_tick ? *resolution.tick : 0.0;
    std::uint64_t tick_index = 1;

    while (true) {
        std::optional<StepResult> fired = step(net, marking, now, stream);
        const double fire_time = fired ? fired->time : std::numeric_limits<double>::infinity();

        // Ticks strictly before the firing; at a tie the firing goes first.
        while (has_tick) {
            double tt = tick_dt * static_cast<double>(tick_index);
            if (tt > horizon || tt >= fire_time) break;
            if (!emit(tt)) return;
            ++tick_index;
        }
        if (!fired || fire_time > horizon) return;

        marking = std::move(fired->marking);
        now = fire_time;
        vars_dirty = true;
        if (resolution.observes_firing(fired->rule)) {
            if (!emit(now)) return;
        }
        while (has_tick) {
            double tt = tick_dt * static_cast<double>(tick_index);
            if (tt != now || tt > horizon) break;
            if (!emit(tt)) return;
            ++tick_index;
        }
    }
}

ExecutionTrace run_trace(const Net& net, const Observer& observer,
                         const TemporalResolution& resolution, double horizon,
                         RandomStream& stream) {
    ExecutionTrace trace;
    trace.schema = observer.schema();
    simulate(net, observer, resolution, horizon, stream,
             [&](double t, std::span<const ObservedValue> values) {
                 trace.samples.push_back(
                     TimedSample{t, std::vector<ObservedValue>(values.begin(), values.end())});
                 return true;
             });
    return trace;
}

ExecutionTrace project(const ExecutionTrace& trace, std::span<const std::string> variables) {
    std::vector<std::size_t> pick;
    for (const std::string& name : variables) {
        std::size_t i = trace.schema->require(name);
        if (std::find(pick.begin(), pick.end(), i) == pick.end()) pick.push_back(i);
    }
    std::sort(pick.begin(), pick.end());

    auto schema = std::make_shared<TraceSchema>();
    for (std::size_t i : pick) {
        schema->names.push_back(trace.schema->names[i]);
        schema->kinds.push_back(trace.schema->kinds[i]);
    }
    ExecutionTrace out;
    out.schema = std::move(schema);
    out.samples.reserve(trace.samples.size());
    for (const TimedSample& s : trace.samples) {
        TimedSample t;
        t.time = s.time;
        t.values.reserve(pick.size());
        for (std::size_t i : pick) t.values.push_back(s.values[i]);
        out.samples.push_back(std::move(t));
    }
    return out;
}

ExecutionTrace prefix(const ExecutionTrace& trace, std::size_t k) {
    if (k >= trace.length()) {
        throw std::out_of_range("prefix index " + std::to_string(k) + " out of range for trace of " +
                                std::to_string(trace.length()) + " samples");
    }
    ExecutionTrace out;
    out.schema = trace.schema;
    out.samples.assign(trace.samples.begin(),
                       trace.samples.begin() + static_cast<std::ptrdiff_t>(k + 1));
    return out;
}

ExecutionTrace suffix(const ExecutionTrace& trace, std::size_t k) {
    if (k >= trace.length()) {
        throw std::out_of_range("suffix index " + std::to_string(k) + " out of range for trace of " +
                                std::to_string(trace.length()) + " samples");
    }
    ExecutionTrace out;
    out.schema = trace.schema;
    out.samples.assign(trace.samples.begin() + static_cast<std::ptrdiff_t>(k), trace.samples.end());
    return out;
}

void write_csv(const ExecutionTrace& trace, std::ostream& out) {
    out << "time";
    for (const std::string& name : trace.schema->names) out << ',' << name;
    out << '\n';
    char buf[32];
    for (const TimedSample& s : trace.samples) {
        std::snprintf(buf, sizeof(buf), "%.9g", s.time);
        out << buf;
        for (const ObservedValue& v : s.values) {
            out << ',';
            if (std::holds_alternative<std::int64_t>(v)) {
                out << std::get<std::int64_t>(v);
            } else if (std::holds_alternative<bool>(v)) {
                out << (std::get<bool>(v) ? '1' : '0');
            } else {
                std::snprintf(buf, sizeof(buf), "%.9g", std::get<double>(v));
                out << buf;
            }
        }
        out << '\n';
    }
}

}  // namespace pnsmc
