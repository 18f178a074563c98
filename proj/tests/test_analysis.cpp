#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gcsim/analysis.hpp"
#include "test_util.hpp"

using namespace gcsim;

namespace {

std::vector<double> sampled(double (*f)(double), double dt, std::size_t n) {
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k) x[k] = f(static_cast<double>(k) * dt);
    return x;
}

} // namespace

TEST_CASE("flux density is flux over area") {
    std::vector<double> phi{0.013802, 0.0, -0.013802};
    auto b = flux_density(phi, 0.0103);
    CHECK(b[0] == doctest::Approx(1.34).epsilon(1e-3));
    CHECK(b[1] == 0.0);
    CHECK(b[2] == doctest::Approx(-1.34).epsilon(1e-3));

    auto half = flux_density(phi, 2.0 * 0.0103);
    for (std::size_t k = 0; k < phi.size(); ++k)
        CHECK(half[k] == doctest::Approx(0.5 * b[k]).epsilon(1e-14));

    CHECK_THROWS_AS(flux_density(phi, 0.0), numerical_input_error);
}

TEST_CASE("dc winding voltage: equal fluxes cancel exactly") {
    testutil::Lcg rng(5);
    std::vector<double> phi(64);
    for (auto& v : phi) v = rng.uniform(-1.0, 1.0);
    auto v = dc_winding_voltage(phi, phi, 225, 1e-4);
    for (double x : v) CHECK(x == 0.0);
}

TEST_CASE("dc winding voltage: linear ramp gives a constant") {
    const double dt = 1e-3;
    std::vector<double> phi_r(100), phi_l(100, 0.0);
    for (std::size_t k = 0; k < phi_r.size(); ++k) phi_r[k] = static_cast<double>(k) * dt;
    auto v = dc_winding_voltage(phi_r, phi_l, 225, dt);
    for (double x : v) CHECK(x == doctest::Approx(225.0).epsilon(1e-12));

    phi_l.pop_back();
    CHECK_THROWS_AS(dc_winding_voltage(phi_r, phi_l, 225, dt), numerical_input_error);
}

TEST_CASE("equivalent inductance: ratio invariance and exclusion handling") {
    const std::size_t n = 400;
    std::vector<double> i(n), lambda(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(n);
        i[k] = 5.0 * std::sin(2.0 * std::numbers::pi * t);
        lambda[k] = 0.2 * i[k];
    }
    const double eps = 0.05;
    InductanceResult a = equivalent_inductance(lambda, i, eps);
    CHECK(a.mean == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(a.peak == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(a.included < n);  // zero crossings excluded
    for (double l : a.series) CHECK(l == doctest::Approx(0.2).epsilon(1e-9));

    // joint scaling of lambda and i leaves L unchanged
    std::vector<double> i3(n), l3(n);
    for (std::size_t k = 0; k < n; ++k) {
        i3[k] = 3.0 * i[k];
        l3[k] = 3.0 * lambda[k];
    }
    InductanceResult b = equivalent_inductance(l3, i3, 3.0 * eps);
    CHECK(b.mean == doctest::Approx(a.mean).epsilon(1e-14));
    CHECK(b.included == a.included);

    std::vector<double> dead(n, 0.0);
    CHECK_THROWS_AS(equivalent_inductance(lambda, dead, eps), error);
}

TEST_CASE("equivalent inductance: excluded stretches interpolate linearly") {
    std::vector<double> i{1.0, 1.0, 0.0, 0.0, 0.0, 1.0};
    std::vector<double> lambda{2.0, 2.0, 0.0, 0.0, 0.0, 8.0};
    InductanceResult r = equivalent_inductance(lambda, i, 0.5);
    CHECK(r.series[1] == doctest::Approx(2.0));
    CHECK(r.series[5] == doctest::Approx(8.0));
    CHECK(r.series[2] == doctest::Approx(3.5));
    CHECK(r.series[3] == doctest::Approx(5.0));
    CHECK(r.series[4] == doctest::Approx(6.5));
    CHECK(r.included == 3);
    CHECK(r.mean == doctest::Approx((2.0 + 2.0 + 8.0) / 3.0));
}

TEST_CASE("power summary: resistive, quadrature and Cauchy-Schwarz") {
    const std::size_t n = 1200;
    const double dt = 1.0 / static_cast<double>(n);
    auto v = sampled([](double t) { return std::sin(2.0 * std::numbers::pi * t); }, dt, n);

    PowerSummary resistive = power_summary(v, v);
    // Q floor is sqrt(machine eps) * S because of the S^2 - P^2 cancellation
    CHECK(resistive.q_reactive == doctest::Approx(0.0).scale(1.0).epsilon(1e-6));
    CHECK(resistive.p_real == doctest::Approx(0.5).epsilon(1e-9));

    auto iq = sampled([](double t) { return std::cos(2.0 * std::numbers::pi * t); }, dt, n);
    PowerSummary quad = power_summary(v, iq);
    CHECK(quad.p_real == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(quad.q_reactive == doctest::Approx(quad.s_apparent).epsilon(1e-12));

    testutil::Lcg rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> a(50), b(50);
        for (std::size_t k = 0; k < a.size(); ++k) {
            a[k] = rng.uniform(-3.0, 3.0);
            b[k] = rng.uniform(-3.0, 3.0);
        }
        PowerSummary s = power_summary(a, b);
        CHECK(s.s_apparent >= std::abs(s.p_real) * (1.0 - 1e-12));
        CHECK(s.q_reactive >= 0.0);
    }

    std::vector<double> short_i(10, 1.0);
    CHECK_THROWS_AS(power_summary(v, short_i), numerical_input_error);
}

TEST_CASE("spectrum: single bins land where they should") {
    const double f0 = 60.0;
    const std::size_t spc = 500;
    const double dt = 1.0 / (f0 * static_cast<double>(spc));
    const std::size_t n = 2 * spc;

    std::vector<double> pure(n), second(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * dt;
        pure[k] = 3.0 * std::sin(2.0 * std::numbers::pi * f0 * t + 0.3);
        second[k] = std::sin(2.0 * std::numbers::pi * 2.0 * f0 * t);
    }

    SpectrumResult a = spectrum(pure, dt, f0);
    CHECK(a.dominant_frequency == doctest::Approx(f0).epsilon(1e-9));
    CHECK(a.thd <= 1e-6);
    CHECK(bin_magnitude(a, f0) == doctest::Approx(3.0).epsilon(1e-9));

    SpectrumResult b = spectrum(second, dt, f0);
    CHECK(b.dominant_frequency == doctest::Approx(2.0 * f0).epsilon(1e-9));

    // inclusive-endpoint windows are accepted too
    std::vector<double> inclusive(pure.begin(), pure.end());
    inclusive.push_back(pure.front());
    SpectrumResult c = spectrum(inclusive, dt, f0);
    CHECK(c.dominant_frequency == doctest::Approx(f0).epsilon(1e-9));

    std::vector<double> ragged(pure.begin(), pure.begin() + 777);
    CHECK_THROWS_AS(spectrum(ragged, dt, f0), numerical_input_error);
}

TEST_CASE("spectrum satisfies Parseval over a composite signal") {
    const double f0 = 50.0;
    const std::size_t spc = 256;
    const double dt = 1.0 / (f0 * static_cast<double>(spc));
    const std::size_t n = 3 * spc;
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * dt;
        const double w = 2.0 * std::numbers::pi * f0;
        x[k] = 0.4 + 2.0 * std::sin(w * t) + 0.7 * std::cos(2.0 * w * t) +
               0.2 * std::sin(5.0 * w * t + 1.1);
    }
    SpectrumResult s = spectrum(x, dt, f0);

    double from_bins = s.magnitudes[0] * s.magnitudes[0];
    for (std::size_t k = 1; k < s.magnitudes.size(); ++k) {
        const bool nyquist = 2 * k == n;
        from_bins += (nyquist ? 1.0 : 0.5) * s.magnitudes[k] * s.magnitudes[k];
    }
    double mean_square = 0.0;
    for (double v : x) mean_square += v * v;
    mean_square /= static_cast<double>(n);
    CHECK(from_bins == doctest::Approx(mean_square).epsilon(1e-9));

    // thd over harmonics of f0: sqrt(0.7^2 + 0.2^2) / 2.0
    CHECK(s.thd == doctest::Approx(std::sqrt(0.49 + 0.04) / 2.0).epsilon(1e-9));
}
