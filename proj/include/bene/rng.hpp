#pragma once

// Sampling helpers on top of std::mt19937_64. The engine's output sequence
// is fixed by the standard but the std:: distributions are not, so traces
// would differ between standard libraries; these draws are spelled out.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace bene {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [lo, hi].
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0) return lo + static_cast<std::int64_t>(engine_());
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return lo + static_cast<std::int64_t>(x % span);
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Knuth's multiplication method; fine for the per-unit means used here.
    std::int64_t poisson(double mean) {
        if (mean <= 0) return 0;
        if (mean > 500) {
            // Normal approximation keeps the loop bounded for huge means.
            const double u1 = 1.0 - uniform();
            const double u2 = uniform();
            const double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
            return std::max<std::int64_t>(0, static_cast<std::int64_t>(std::llround(mean + z * std::sqrt(mean))));
        }
        const double limit = std::exp(-mean);
        std::int64_t k = 0;
        double p = uniform();
        while (p > limit) {
            ++k;
            p *= uniform();
        }
        return k;
    }

    /// Number of trials until the first success, support {1, 2, ...}.
    std::int64_t geometric(double mean) {
        if (mean <= 1.0) return 1;
        const double p = 1.0 / mean;
        const double u = 1.0 - uniform(); // (0, 1]
        return 1 + static_cast<std::int64_t>(std::floor(std::log(u) / std::log1p(-p)));
    }

private:
    std::mt19937_64 engine_;
};

} // namespace bene
