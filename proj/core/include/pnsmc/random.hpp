#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace pnsmc {

/// Inverse-transform sampling of Exp(rate) from a uniform draw u in [0,1):
/// x = -ln(1-u)/rate. u = 0 maps to 0.
/// Throws std::invalid_argument unless rate is finite and > 0.
double exponential_from_uniform(double u, double rate);

/// Cumulative-sum inversion of one uniform draw u in [0,1) over non-negative
/// weights. Returns the smallest index i with u*sum(w) < w_0+...+w_i.
/// Throws std::invalid_argument if weights are empty, any is negative or
/// non-finite, or all are zero.
std::size_t discrete_from_uniform(double u, std::span<const double> weights);

/// Deterministic pseudo-random stream, reproducible from a 64-bit seed.
///
/// Streams for parallel trace generation are derived from (master seed,
/// trace index) in O(1), so the set of per-trace streams is independent of
/// thread count and of how many draws the master has already produced.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed);

    std::uint64_t seed() const { return seed_; }

    /// Next uniform draw in [0, 1), with 53 random bits.
    double uniform01();

    /// Exp(rate) via inverse transform on the next uniform draw.
    double exponential(double rate) { return exponential_from_uniform(uniform01(), rate); }

    /// Index sampled proportionally to weights, consuming one uniform draw.
    std::size_t discrete(std::span<const double> weights) {
        return discrete_from_uniform(uniform01(), weights);
    }

    /// Independent stream keyed by (this stream's seed, index).
    /// Repeated calls with the same index yield identical streams regardless
    /// of draws consumed in between.
    RandomStream derive(std::uint64_t index) const;

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

/// Free-function spelling of RandomStream::derive.
inline RandomStream derive_stream(const RandomStream& master, std::uint64_t trace_index) {
    return master.derive(trace_index);
}

}  // namespace pnsmc
