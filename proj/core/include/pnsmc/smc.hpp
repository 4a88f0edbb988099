#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "pnsmc/bltl.hpp"
#include "pnsmc/monitor.hpp"
#include "pnsmc/net.hpp"
#include "pnsmc/trace.hpp"

namespace pnsmc {

/// Estimate from a fixed number of traces.
struct FixedRuns {
    std::int64_t n = 1;
};

/// Estimate with an absolute-error guarantee: Pr(|estimate - p| >= epsilon)
/// <= delta, via the Okamoto/Chernoff sample size.
struct ChernoffBound {
    double epsilon = 0.1;
    double delta = 0.05;
};

/// Wald sequential test of H0: p >= theta + half_width against
/// H1: p <= theta - half_width with error bounds alpha (false reject of H0)
/// and beta (false accept).
struct SprtQuery {
    double theta = 0.5;
    double alpha = 0.01;
    double beta = 0.01;
    double half_width = 0.01;
};

/// Mean of an observed variable read at the last sample with time <= at_time,
/// over n traces.
struct ExpectationQuery {
    std::string variable;
    double at_time = 0.0;
    std::int64_t n = 1;
};

using Query = std::variant<FixedRuns, ChernoffBound, SprtQuery, ExpectationQuery>;

enum class SprtVerdict : unsigned char { Accept, Reject };

std::string_view to_string(SprtVerdict v);

struct VerificationResult {
    Query query;
    std::string property;  // printed formula, or mean(<variable>)
    double estimate = 0.0;
    double ci_low = 0.0;   // 95% normal-approximation interval
    double ci_high = 0.0;
    std::optional<SprtVerdict> verdict;  // sequential tests only
    std::int64_t traces_used = 0;
    std::uint64_t seed = 0;
    double elapsed_seconds = 0.0;
};

/// Single-line JSON rendering with fixed field names and order (see the CLI
/// docs): kind, property, parameters, estimate, ci_low, ci_high, verdict,
/// traces_used, seed, elapsed_seconds.
std::string to_json(const VerificationResult& result);

/// Okamoto/Chernoff sample size ceil(ln(2/delta) / (2 epsilon^2)).
/// Throws std::invalid_argument unless both parameters lie in (0,1).
std::int64_t chernoff_sample_size(double epsilon, double delta);

struct RunOptions {
    std::uint64_t seed = 0;
    unsigned jobs = 1;  // worker threads; never affects results
};

/// Probability that a random trace satisfies the property. Trace i runs on
/// derive_stream(seed, i) to the formula's total nested time bound and is
/// checked incrementally (stopping as soon as the verdict is conclusive).
VerificationResult estimate_probability(const Net& net, const Observer& observer,
                                        const TemporalResolution& resolution,
                                        const FormulaPtr& property, const FixedRuns& query,
                                        const RunOptions& options);

/// Same estimator for several properties over one shared set of traces.
/// Each result is identical to the corresponding single-property call.
std::vector<VerificationResult> estimate_probabilities(const Net& net, const Observer& observer,
                                                       const TemporalResolution& resolution,
                                                       std::span<const FormulaPtr> properties,
                                                       const FixedRuns& query,
                                                       const RunOptions& options);

/// FixedRuns with n = chernoff_sample_size(epsilon, delta).
VerificationResult estimate_probability(const Net& net, const Observer& observer,
                                        const TemporalResolution& resolution,
                                        const FormulaPtr& property, const ChernoffBound& query,
                                        const RunOptions& options);

/// Wald SPRT. Trace outcomes are consumed strictly in trace-index order, so
/// verdict and traces_used do not depend on the worker count.
VerificationResult sprt(const Net& net, const Observer& observer,
                        const TemporalResolution& resolution, const FormulaPtr& property,
                        const SprtQuery& query, const RunOptions& options);

/// Mean and 95% interval (1.96 standard errors) of an observed variable at
/// the last sample with time <= at_time, over n traces.
VerificationResult estimate_expectation(const Net& net, const Observer& observer,
                                        const TemporalResolution& resolution,
                                        const ExpectationQuery& query, const RunOptions& options);

/// Expectation sweep: every (variable, at_time) pair from one shared set of
/// traces, each simulated once to the largest at_time. Results are listed
/// variable-major (all at_times of variables[0] first) and are identical to
/// the corresponding single calls with n = query n and the same seed.
std::vector<VerificationResult> estimate_expectations(const Net& net, const Observer& observer,
                                                      const TemporalResolution& resolution,
                                                      std::span<const std::string> variables,
                                                      std::span<const double> at_times,
                                                      std::int64_t n, const RunOptions& options);

}  // namespace pnsmc
