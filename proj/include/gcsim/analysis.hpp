#pragma once

// =============================================================================
// Post-processing of waveform sets into reported quantities: flux densities,
// dc-winding voltage, equivalent inductance, power transfer and spectra.
// All functions are pure; spectral operations require windows spanning an
// integer number of fundamental periods (leakage-free bins by construction).
// =============================================================================

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "gcsim/errors.hpp"
#include "gcsim/waveform.hpp"

namespace gcsim {

/// Elementwise B = Phi / A.
inline std::vector<double> flux_density(const std::vector<double>& phi_wb, double area_m2) {
    if (!(area_m2 > 0.0) || !std::isfinite(area_m2))
        throw numerical_input_error("flux_density: area must be strictly positive");
    std::vector<double> b(phi_wb.size());
    for (std::size_t k = 0; k < phi_wb.size(); ++k) b[k] = phi_wb[k] / area_m2;
    return b;
}

/// Voltage across the series pair of dc windings reconstructed from the
/// outer-leg fluxes: v = n_dc * (dphi_right/dt - dphi_left/dt), derivatives
/// by central differences (one-sided at the ends). Serves as an independent
/// cross-check of the solver's own dc terminal-voltage channel.
inline std::vector<double> dc_winding_voltage(const std::vector<double>& phi_right,
                                              const std::vector<double>& phi_left, int n_dc,
                                              double dt) {
    if (phi_right.size() != phi_left.size())
        throw numerical_input_error("dc_winding_voltage: channel length mismatch");
    if (!(dt > 0.0)) throw numerical_input_error("dc_winding_voltage: dt must be positive");
    const std::size_t n = phi_right.size();
    std::vector<double> v(n, 0.0);
    if (n < 2) return v;
    auto diff = [&](const std::vector<double>& x, std::size_t k) {
        if (k == 0) return (x[1] - x[0]) / dt;
        if (k == n - 1) return (x[n - 1] - x[n - 2]) / dt;
        return (x[k + 1] - x[k - 1]) / (2.0 * dt);
    };
    for (std::size_t k = 0; k < n; ++k)
        v[k] = static_cast<double>(n_dc) * (diff(phi_right, k) - diff(phi_left, k));
    return v;
}

struct InductanceResult {
    std::vector<double> series;  // L(t), excluded samples linearly interpolated
    double mean = 0.0;           // time average over included samples only
    std::size_t included = 0;
    double peak = 0.0;           // max |L| over included samples
};

/// L(t) = lambda(t) / i(t) guarded against current zero crossings: samples
/// with |i| < exclusion_eps are excluded from peak/mean and bridged by linear
/// interpolation in the plotted series.
inline InductanceResult equivalent_inductance(const std::vector<double>& flux_linkage,
                                              const std::vector<double>& current,
                                              double exclusion_eps) {
    if (flux_linkage.size() != current.size())
        throw numerical_input_error("equivalent_inductance: channel length mismatch");
    if (!(exclusion_eps > 0.0))
        throw numerical_input_error("equivalent_inductance: exclusion_eps must be positive");
    const std::size_t n = current.size();

    InductanceResult r;
    r.series.assign(n, std::numeric_limits<double>::quiet_NaN());
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        if (std::abs(current[k]) >= exclusion_eps) {
            r.series[k] = flux_linkage[k] / current[k];
            sum += r.series[k];
            r.peak = std::max(r.peak, std::abs(r.series[k]));
            ++r.included;
        }
    }
    if (r.included == 0)
        throw error("equivalent_inductance: all samples excluded (current identically below eps)");
    r.mean = sum / static_cast<double>(r.included);

    // bridge excluded stretches for plotting
    std::size_t first = 0;
    while (std::isnan(r.series[first])) ++first;
    std::size_t last = n - 1;
    while (std::isnan(r.series[last])) --last;
    for (std::size_t k = 0; k < first; ++k) r.series[k] = r.series[first];
    for (std::size_t k = last + 1; k < n; ++k) r.series[k] = r.series[last];
    std::size_t k = first;
    while (k <= last) {
        if (!std::isnan(r.series[k])) {
            ++k;
            continue;
        }
        std::size_t j = k;
        while (std::isnan(r.series[j])) ++j;
        const double a = r.series[k - 1], b = r.series[j];
        const double span = static_cast<double>(j - (k - 1));
        for (std::size_t m = k; m < j; ++m)
            r.series[m] = a + (b - a) * static_cast<double>(m - (k - 1)) / span;
        k = j;
    }
    return r;
}

struct PowerSummary {
    double p_real = 0.0;      // W, mean(v*i)
    double s_apparent = 0.0;  // VA, rms(v)*rms(i)
    double q_reactive = 0.0;  // var, sqrt(max(0, S^2 - P^2))
};

inline PowerSummary power_summary(const std::vector<double>& v, const std::vector<double>& i) {
    if (v.size() != i.size()) throw numerical_input_error("power_summary: length mismatch");
    if (v.empty()) throw numerical_input_error("power_summary: empty series");
    double p = 0.0, vv = 0.0, ii = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        p += v[k] * i[k];
        vv += v[k] * v[k];
        ii += i[k] * i[k];
    }
    const double n = static_cast<double>(v.size());
    PowerSummary s;
    s.p_real = p / n;
    s.s_apparent = std::sqrt(vv / n) * std::sqrt(ii / n);
    s.q_reactive = std::sqrt(std::max(0.0, s.s_apparent * s.s_apparent - s.p_real * s.p_real));
    return s;
}

struct SpectrumResult {
    std::vector<double> frequencies;  // Hz, bin k at k / (window length)
    std::vector<double> magnitudes;   // one-sided amplitudes
    double dominant_frequency = 0.0;  // largest non-dc bin
    double thd = 0.0;                 // over harmonics of f0
};

/// One-sided discrete Fourier magnitudes of a window spanning an integer
/// number of f0 periods. Accepts either K samples covering the periods
/// half-open or K+1 samples with both endpoints included (the duplicated
/// endpoint is dropped).
inline SpectrumResult spectrum(const std::vector<double>& series, double dt, double f0) {
    if (!(dt > 0.0) || !(f0 > 0.0))
        throw numerical_input_error("spectrum: dt and f0 must be positive");
    auto whole_periods = [&](std::size_t count) {
        const double p = static_cast<double>(count) * dt * f0;
        return p >= 0.5 && std::abs(p - std::round(p)) <= 1e-6 * std::max(1.0, p);
    };
    std::size_t n = series.size();
    if (n >= 2 && whole_periods(n - 1))
        n -= 1;
    else if (!whole_periods(n))
        throw numerical_input_error(
            "spectrum: window does not span an integer number of f0 periods");
    if (n < 4) throw numerical_input_error("spectrum: window too short");

    const std::size_t half = n / 2;
    SpectrumResult out;
    out.frequencies.resize(half + 1);
    out.magnitudes.resize(half + 1);
    for (std::size_t k = 0; k <= half; ++k) {
        double re = 0.0, im = 0.0;
        const double w = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        for (std::size_t j = 0; j < n; ++j) {
            const double ang = w * static_cast<double>(j);
            re += series[j] * std::cos(ang);
            im -= series[j] * std::sin(ang);
        }
        const bool shared = (k == 0) || (2 * k == n);  // dc and Nyquist are not mirrored
        const double scale = (shared ? 1.0 : 2.0) / static_cast<double>(n);
        out.frequencies[k] = static_cast<double>(k) / (static_cast<double>(n) * dt);
        out.magnitudes[k] = scale * std::hypot(re, im);
    }

    std::size_t dominant = 1;
    for (std::size_t k = 2; k <= half; ++k)
        if (out.magnitudes[k] > out.magnitudes[dominant]) dominant = k;
    out.dominant_frequency = out.frequencies[dominant];

    const std::size_t fund =
        static_cast<std::size_t>(std::llround(static_cast<double>(n) * dt * f0));
    double harm = 0.0;
    for (std::size_t h = 2; h * fund <= half; ++h) {
        const double m = out.magnitudes[h * fund];
        harm += m * m;
    }
    const double fundamental = fund <= half ? out.magnitudes[fund] : 0.0;
    out.thd = fundamental > 0.0 ? std::sqrt(harm) / fundamental
                                : std::numeric_limits<double>::infinity();
    return out;
}

/// Amplitude of the bin at frequency `f` (must be a whole number of periods
/// in the window); convenience for harmonic checks.
inline double bin_magnitude(const SpectrumResult& s, double f) {
    for (std::size_t k = 0; k < s.frequencies.size(); ++k)
        if (std::abs(s.frequencies[k] - f) <= 1e-6 * std::max(1.0, f)) return s.magnitudes[k];
    throw numerical_input_error("bin_magnitude: no bin at " + std::to_string(f) + " Hz");
}

} // namespace gcsim
