#include "pnsmc/random.hpp"

#include <cmath>
#include <stdexcept>

namespace pnsmc {

namespace {

// SplitMix64 finalizer; decorrelates consecutive seeds and derived indices.
std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

double exponential_from_uniform(double u, double rate) {
    if (!std::isfinite(rate) || rate <= 0.0) {
        throw std::invalid_argument("exponential rate must be finite and > 0");
    }
    // log1p keeps precision for small u; -ln(1-u) is exactly 0 at u = 0.
    return -std::log1p(-u) / rate;
}

std::size_t discrete_from_uniform(double u, std::span<const double> weights) {
    if (weights.empty()) {
        throw std::invalid_argument("discrete weights must be non-empty");
    }
    double total = 0.0;
    for (double w : weights) {
        if (!std::isfinite(w) || w < 0.0) {
            throw std::invalid_argument("discrete weights must be finite and >= 0");
        }
        total += w;
    }
    if (total <= 0.0) {
        throw std::invalid_argument("discrete weights must not all be zero");
    }
    double r = u * total;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] > 0.0) {
            if (r < weights[i]) return i;
            r -= weights[i];
            last_positive = i;
        }
    }
    // Rounding at the top of the cumulative sum; attribute to the last
    // positive-weight bucket.
    return last_positive;
}

RandomStream::RandomStream(std::uint64_t seed) : seed_(seed), engine_(mix64(seed)) {}

double RandomStream::uniform01() {
    // 53-bit mantissa; value is in [0, 1).
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

RandomStream RandomStream::derive(std::uint64_t index) const {
    return RandomStream(mix64(seed_ ^ mix64(index)));
}

}  // namespace pnsmc
