#include "pnsmc/smc.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "pnsmc/errors.hpp"

namespace pnsmc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void require_unit_interval(double x, const char* name) {
    if (!(x > 0.0) || !(x < 1.0)) {
        throw std::invalid_argument(std::string(name) + " must lie strictly between 0 and 1");
    }
}

/// Runs body(i) for every index in [0, n), optionally on several worker
/// threads. Work items write only to per-index slots, so scheduling cannot
/// affect results. The first exception is rethrown on the caller's thread.
void run_indices(std::int64_t n, unsigned jobs, const std::function<void(std::int64_t)>& body) {
    if (n <= 0) return;
    const unsigned workers =
        static_cast<unsigned>(std::min<std::int64_t>(std::max(1u, jobs), n));
    if (workers == 1) {
        for (std::int64_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::atomic<bool> stop{false};
    std::mutex err_mutex;
    std::exception_ptr err;
    auto worker = [&] {
        for (std::int64_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
            if (stop.load(std::memory_order_relaxed)) return;
            try {
                body(i);
            } catch (...) {
                std::scoped_lock lock(err_mutex);
                if (!err) err = std::current_exception();
                stop.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
    if (err) std::rethrow_exception(err);
}

/// Simulation horizon that makes every monitor conclusive: the largest
/// total nested bound across the properties. Step bounds convert to time
/// through the tick period; with firing-driven sampling they impose no time
/// limit, so the horizon is unbounded and per-trace early stopping (every
/// step budget runs out after finitely many samples) ends the run.
double horizon_for(std::span<const FormulaPtr> properties, const TemporalResolution& resolution) {
    const double tick_dt = resolution.tick.value_or(0.0);
    double horizon = 0.0;
    for (const FormulaPtr& f : properties) {
        if (has_step_bound(f) && !resolution.tick) {
            return std::numeric_limits<double>::max();
        }
        horizon = std::max(horizon, total_time_bound(f, tick_dt));
    }
    return horizon;
}

/// Checks properties on the trace with index `trace_index`, writing one
/// 0/1 outcome per property to out[0..properties.size()).
void check_one_trace(const Net& net, const Observer& observer,
                     const TemporalResolution& resolution,
                     std::span<const FormulaPtr> properties, double horizon, std::uint64_t seed,
                     std::int64_t trace_index, std::uint8_t* out) {
    RandomStream stream = derive_stream(RandomStream(seed), static_cast<std::uint64_t>(trace_index));
    boost::container::small_vector<Monitor, 8> monitors;
    for (const FormulaPtr& f : properties) monitors.emplace_back(f, observer.schema());
    std::size_t undecided = monitors.size();
    simulate(net, observer, resolution, horizon, stream,
             [&](double t, std::span<const ObservedValue> values) {
                 for (Monitor& m : monitors) {
                     if (!m.conclusive() && m.feed(t, values) != Verdict::Undecided) --undecided;
                 }
                 return undecided > 0;
             });
    for (std::size_t j = 0; j < monitors.size(); ++j) {
        Verdict v = monitors[j].conclusive() ? monitors[j].verdict() : monitors[j].finish();
        out[j] = (v == Verdict::True) ? 1 : 0;
    }
}

struct Interval {
    double low;
    double high;
};

Interval normal_ci(double p, std::int64_t n) {
    const double hw = 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    return {std::max(0.0, p - hw), std::min(1.0, p + hw)};
}

VerificationResult fixed_runs_result(const Net& net, const Observer& observer,
                                     const TemporalResolution& resolution,
                                     const FormulaPtr& property, std::int64_t n,
                                     const RunOptions& options, Query query_echo,
                                     Clock::time_point start) {
    if (n < 1) throw std::invalid_argument("the number of runs must be >= 1");
    const FormulaPtr props[1] = {property};
    const double horizon = horizon_for(props, resolution);
    std::vector<std::uint8_t> holds(static_cast<std::size_t>(n), 0);
    run_indices(n, options.jobs, [&](std::int64_t i) {
        check_one_trace(net, observer, resolution, props, horizon, options.seed, i,
                        &holds[static_cast<std::size_t>(i)]);
    });
    const auto successes =
        static_cast<std::int64_t>(std::count(holds.begin(), holds.end(), std::uint8_t{1}));
    VerificationResult r;
    r.query = query_echo;
    r.property = print(property);
    r.estimate = static_cast<double>(successes) / static_cast<double>(n);
    const Interval ci = normal_ci(r.estimate, n);
    r.ci_low = ci.low;
    r.ci_high = ci.high;
    r.traces_used = n;
    r.seed = options.seed;
    r.elapsed_seconds = seconds_since(start);
    return r;
}

}  // namespace

std::string_view to_string(SprtVerdict v) {
    return v == SprtVerdict::Accept ? "accept" : "reject";
}

std::int64_t chernoff_sample_size(double epsilon, double delta) {
    require_unit_interval(epsilon, "epsilon");
    require_unit_interval(delta, "delta");
    return static_cast<std::int64_t>(std::ceil(std::log(2.0 / delta) / (2.0 * epsilon * epsilon)));
}

VerificationResult estimate_probability(const Net& net, const Observer& observer,
                                        const TemporalResolution& resolution,
                                        const FormulaPtr& property, const FixedRuns& query,
                                        const RunOptions& options) {
    return fixed_runs_result(net, observer, resolution, property, query.n, options, query,
                             Clock::now());
}

std::vector<VerificationResult> estimate_probabilities(const Net& net, const Observer& observer,
                                                       const TemporalResolution& resolution,
                                                       std::span<const FormulaPtr> properties,
                                                       const FixedRuns& query,
                                                       const RunOptions& options) {
    const auto start = Clock::now();
    if (query.n < 1) throw std::invalid_argument("the number of runs must be >= 1");
    if (properties.empty()) return {};
    const std::size_t nf = properties.size();
    const double horizon = horizon_for(properties, resolution);
    std::vector<std::uint8_t> holds(static_cast<std::size_t>(query.n) * nf, 0);
    run_indices(query.n, options.jobs, [&](std::int64_t i) {
        check_one_trace(net, observer, resolution, properties, horizon, options.seed, i,
                        &holds[static_cast<std::size_t>(i) * nf]);
    });
    std::vector<VerificationResult> results(nf);
    const double elapsed = seconds_since(start);
    for (std::size_t j = 0; j < nf; ++j) {
        std::int64_t successes = 0;
        for (std::int64_t i = 0; i < query.n; ++i) {
            successes += holds[static_cast<std::size_t>(i) * nf + j];
        }
        VerificationResult& r = results[j];
        r.query = query;
        r.property = print(properties[j]);
        r.estimate = static_cast<double>(successes) / static_cast<double>(query.n);
        const Interval ci = normal_ci(r.estimate, query.n);
        r.ci_low = ci.low;
        r.ci_high = ci.high;
        r.traces_used = query.n;
        r.seed = options.seed;
        r.elapsed_seconds = elapsed;
    }
    return results;
}

VerificationResult estimate_probability(const Net& net, const Observer& observer,
                                        const TemporalResolution& resolution,
                                        const FormulaPtr& property, const ChernoffBound& query,
                                        const RunOptions& options) {
    const auto start = Clock::now();
    const std::int64_t n = chernoff_sample_size(query.epsilon, query.delta);
    return fixed_runs_result(net, observer, resolution, property, n, options, query, start);
}

VerificationResult sprt(const Net& net, const Observer& observer,
                        const TemporalResolution& resolution, const FormulaPtr& property,
                        const SprtQuery& query, const RunOptions& options) {
    const auto start = Clock::now();
    require_unit_interval(query.theta, "theta");
    require_unit_interval(query.alpha, "alpha");
    require_unit_interval(query.beta, "beta");
    if (!(query.half_width > 0.0) || !(query.theta - query.half_width > 0.0) ||
        !(query.theta + query.half_width < 1.0)) {
        throw std::invalid_argument(
            "half_width must satisfy 0 < half_width < min(theta, 1 - theta)");
    }
    const double p0 = query.theta - query.half_width;
    const double p1 = query.theta + query.half_width;
    // Log-likelihood-ratio increments for one success / one failure, and
    // Wald's acceptance thresholds, all in log space.
    const double inc_success = std::log(p1 / p0);
    const double inc_failure = std::log((1.0 - p1) / (1.0 - p0));
    const double accept_at = std::log((1.0 - query.beta) / query.alpha);
    const double reject_at = std::log(query.beta / (1.0 - query.alpha));

    const FormulaPtr props[1] = {property};
    const double horizon = horizon_for(props, resolution);

    // Outcomes are generated in chunks (in parallel when jobs > 1) but
    // consumed strictly in trace-index order, so the verdict and the number
    // of traces consumed do not depend on the worker count.
    const std::int64_t chunk = std::max<std::int64_t>(1, static_cast<std::int64_t>(options.jobs));
    std::vector<std::uint8_t> outcomes;
    double log_ratio = 0.0;
    std::int64_t used = 0;
    std::int64_t successes = 0;
    std::optional<SprtVerdict> verdict;
    for (std::int64_t base = 0; !verdict; base += chunk) {
        outcomes.assign(static_cast<std::size_t>(chunk), 0);
        run_indices(chunk, options.jobs, [&](std::int64_t k) {
            check_one_trace(net, observer, resolution, props, horizon, options.seed, base + k,
                            &outcomes[static_cast<std::size_t>(k)]);
        });
        for (std::int64_t k = 0; k < chunk; ++k) {
            const bool x = outcomes[static_cast<std::size_t>(k)] != 0;
            log_ratio += x ? inc_success : inc_failure;
            ++used;
            successes += x ? 1 : 0;
            if (log_ratio >= accept_at) {
                verdict = SprtVerdict::Accept;
                break;
            }
            if (log_ratio <= reject_at) {
                verdict = SprtVerdict::Reject;
                break;
            }
        }
    }

    VerificationResult r;
    r.query = query;
    r.property = print(property);
    r.estimate = static_cast<double>(successes) / static_cast<double>(used);
    const Interval ci = normal_ci(r.estimate, used);
    r.ci_low = ci.low;
    r.ci_high = ci.high;
    r.verdict = verdict;
    r.traces_used = used;
    r.seed = options.seed;
    r.elapsed_seconds = seconds_since(start);
    return r;
}

VerificationResult estimate_expectation(const Net& net, const Observer& observer,
                                        const TemporalResolution& resolution,
                                        const ExpectationQuery& query, const RunOptions& options) {
    const std::string variables[1] = {query.variable};
    const double at_times[1] = {query.at_time};
    auto results = estimate_expectations(net, observer, resolution, variables, at_times, query.n,
                                         options);
    return std::move(results.front());
}

std::vector<VerificationResult> estimate_expectations(const Net& net, const Observer& observer,
                                                      const TemporalResolution& resolution,
                                                      std::span<const std::string> variables,
                                                      std::span<const double> at_times,
                                                      std::int64_t n, const RunOptions& options) {
    const auto start = Clock::now();
    if (n < 1) throw std::invalid_argument("the number of runs must be >= 1");
    if (variables.empty() || at_times.empty()) return {};
    const TraceSchema& schema = *observer.schema();
    std::vector<std::size_t> slots;
    for (const std::string& name : variables) {
        const std::size_t slot = schema.require(name);
        if (schema.kinds[slot] == ValueKind::Bool) {
            throw EvalError("variable '" + name + "' is Boolean; expectations need a number");
        }
        slots.push_back(slot);
    }
    for (double t : at_times) {
        if (!(t >= 0.0) || !std::isfinite(t)) {
            throw std::invalid_argument("expectation times must be finite and >= 0");
        }
    }
    // Grid times in ascending order for the single-pass sweep; results are
    // reported in the caller's order via this permutation.
    std::vector<std::size_t> order(at_times.size());
    for (std::size_t g = 0; g < order.size(); ++g) order[g] = g;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return at_times[a] < at_times[b]; });
    std::vector<double> grid;
    for (std::size_t g : order) grid.push_back(at_times[g]);
    const double horizon = grid.back();

    const std::size_t nv = slots.size();
    const std::size_t ng = grid.size();
    // values[(i * nv + v) * ng + g] = variable v at sorted grid point g of
    // trace i. Filled per index, reduced afterwards in index order so the
    // result is identical for every worker count.
    std::vector<double> values(static_cast<std::size_t>(n) * nv * ng, 0.0);

    run_indices(n, options.jobs, [&](std::int64_t i) {
        RandomStream stream = derive_stream(RandomStream(options.seed),
                                            static_cast<std::uint64_t>(i));
        std::vector<double> current(nv, 0.0);
        std::size_t g = 0;
        double* out = &values[static_cast<std::size_t>(i) * nv * ng];
        auto snapshot_until = [&](double exclusive_time) {
            while (g < ng && grid[g] < exclusive_time) {
                for (std::size_t v = 0; v < nv; ++v) out[v * ng + g] = current[v];
                ++g;
            }
        };
        simulate(net, observer, resolution, horizon, stream,
                 [&](double t, std::span<const ObservedValue> sample) {
                     snapshot_until(t);
                     for (std::size_t v = 0; v < nv; ++v) current[v] = as_real(sample[slots[v]]);
                     return true;
                 });
        snapshot_until(std::numeric_limits<double>::infinity());
    });

    std::vector<VerificationResult> results;
    results.reserve(nv * ng);
    const double elapsed = seconds_since(start);
    for (std::size_t v = 0; v < nv; ++v) {
        std::vector<VerificationResult> by_grid(ng);
        for (std::size_t g = 0; g < ng; ++g) {
            double sum = 0.0;
            for (std::int64_t i = 0; i < n; ++i) {
                sum += values[(static_cast<std::size_t>(i) * nv + v) * ng + g];
            }
            const double mean = sum / static_cast<double>(n);
            double sq = 0.0;
            for (std::int64_t i = 0; i < n; ++i) {
                const double d = values[(static_cast<std::size_t>(i) * nv + v) * ng + g] - mean;
                sq += d * d;
            }
            const double stderr_mean =
                n > 1 ? std::sqrt(sq / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
            VerificationResult r;
            ExpectationQuery echo;
            echo.variable = variables[v];
            echo.at_time = grid[g];
            echo.n = n;
            r.query = echo;
            r.property = "mean(" + variables[v] + ")";
            r.estimate = mean;
            r.ci_low = mean - 1.96 * stderr_mean;
            r.ci_high = mean + 1.96 * stderr_mean;
            r.traces_used = n;
            r.seed = options.seed;
            r.elapsed_seconds = elapsed;
            by_grid[g] = std::move(r);
        }
        // Restore the caller's at_times order.
        std::vector<VerificationResult> caller_order(ng);
        for (std::size_t g = 0; g < ng; ++g) caller_order[order[g]] = std::move(by_grid[g]);
        for (std::size_t g = 0; g < ng; ++g) results.push_back(std::move(caller_order[g]));
    }
    return results;
}

std::string to_json(const VerificationResult& result) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json params;
    const char* kind = "fixed_runs";
    if (const auto* q = std::get_if<FixedRuns>(&result.query)) {
        kind = "fixed_runs";
        params["n"] = q->n;
    } else if (const auto* q = std::get_if<ChernoffBound>(&result.query)) {
        kind = "chernoff";
        params["epsilon"] = q->epsilon;
        params["delta"] = q->delta;
    } else if (const auto* q = std::get_if<SprtQuery>(&result.query)) {
        kind = "sprt";
        params["theta"] = q->theta;
        params["alpha"] = q->alpha;
        params["beta"] = q->beta;
        params["half_width"] = q->half_width;
    } else if (const auto* q = std::get_if<ExpectationQuery>(&result.query)) {
        kind = "expectation";
        params["variable"] = q->variable;
        params["at_time"] = q->at_time;
        params["n"] = q->n;
    }
    j["kind"] = kind;
    j["property"] = result.property;
    j["parameters"] = params;
    j["estimate"] = result.estimate;
    j["ci_low"] = result.ci_low;
    j["ci_high"] = result.ci_high;
    if (result.verdict) {
        j["verdict"] = std::string(to_string(*result.verdict));
    } else {
        j["verdict"] = nullptr;
    }
    j["traces_used"] = result.traces_used;
    j["seed"] = result.seed;
    j["elapsed_seconds"] = result.elapsed_seconds;
    return j.dump();
}

}  // namespace pnsmc
