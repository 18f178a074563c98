#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace testutil {

/// Small deterministic generator for property-style tests.
struct Lcg {
    std::uint64_t state = 0x9e3779b97f4a7c15ull;

    explicit Lcg(std::uint64_t seed = 1) { state ^= seed * 0x2545f4914f6cdd1dull; }

    std::uint64_t next() {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        return state;
    }

    double uniform(double lo, double hi) {
        const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
        return lo + u * (hi - lo);
    }
};

/// First-harmonic fit over an integer number of periods:
/// x ~ amplitude * sin(2 pi f t + phase).
struct Harmonic {
    double amplitude;
    double phase;
};

inline Harmonic fit_fundamental(const std::vector<double>& x, double t0, double dt, double f) {
    const double w = 2.0 * std::numbers::pi * f;
    double a = 0.0, b = 0.0;
    const std::size_t n = x.size();
    for (std::size_t k = 0; k < n; ++k) {
        const double t = t0 + static_cast<double>(k) * dt;
        a += x[k] * std::sin(w * t);
        b += x[k] * std::cos(w * t);
    }
    a *= 2.0 / static_cast<double>(n);
    b *= 2.0 / static_cast<double>(n);
    return {std::hypot(a, b), std::atan2(b, a)};
}

} // namespace testutil
