#pragma once

// =============================================================================
// Magnetic-domain physics: permeances, the saturation law of a core leg, and
// the winding gyrator parameterization used to couple the electric circuit to
// the magnetic one.
//
// Unit conventions: magnetic potential in amp-turns, magnetic flow in Wb/s,
// permeance in Wb per amp-turn (numerically equal to henry).
// =============================================================================

#include <cmath>
#include <cstdio>
#include <numbers>

#include "gcsim/errors.hpp"

namespace gcsim {

/// Permeability of free space, H/m.
inline constexpr double mu0 = 4.0 * std::numbers::pi * 1e-7;

/// Mean path length and cross-section of one core leg (or gap).
struct CoreLegGeometry {
    double length_m = 0.0;
    double area_m2 = 0.0;

    [[nodiscard]] bool valid() const {
        return std::isfinite(length_m) && std::isfinite(area_m2) && length_m > 0.0 &&
               area_m2 > 0.0;
    }
};

/// Single-valued (anhysteretic) saturation law of the core material.
///
/// B(H) = (2 B_sat / pi) * atan(pi (mu_r - 1) mu0 H / (2 B_sat)) + mu0 H
///
/// The initial slope is exactly mu_r * mu0 and the large-|H| asymptote is
/// +-B_sat + mu0 H, so the curve is pinned by the two material numbers it is
/// built from. Smooth everywhere, which keeps Newton iterations happy.
struct SaturationCurve {
    double b_sat = 1.34;         // T
    double mu_r_initial = 8000;  // dimensionless

    [[nodiscard]] bool valid() const {
        return std::isfinite(b_sat) && std::isfinite(mu_r_initial) && b_sat > 0.0 &&
               mu_r_initial > 1.0;
    }

    [[nodiscard]] double b_of_h(double h) const {
        const double k = std::numbers::pi * (mu_r_initial - 1.0) * mu0 / (2.0 * b_sat);
        return (2.0 * b_sat / std::numbers::pi) * std::atan(k * h) + mu0 * h;
    }

    /// dB/dH, analytic.
    [[nodiscard]] double db_dh(double h) const {
        const double k = std::numbers::pi * (mu_r_initial - 1.0) * mu0 / (2.0 * b_sat);
        const double u = k * h;
        return (mu_r_initial - 1.0) * mu0 / (1.0 + u * u) + mu0;
    }
};

/// Flux carried per amp-turn of drive; the "capacitance" of a magnetic path.
struct Permeance {
    double value = 0.0;  // Wb / A-turn

    [[nodiscard]] bool valid() const { return std::isfinite(value) && value > 0.0; }
};

/// Turns count and winding sense of one winding, realized as a gyrator
/// between the electrical and magnetic domains.
struct WindingGyrator {
    int turns = 1;
    int orientation = +1;  // +1 or -1, winding sense

    [[nodiscard]] bool valid() const { return turns >= 1 && (orientation == 1 || orientation == -1); }
};

/// Permeance of a path with constant relative permeability: mu_r mu0 A / l.
inline Permeance linear_permeance(const CoreLegGeometry& geometry, double mu_r) {
    if (!geometry.valid())
        throw numerical_input_error("linear_permeance: geometry must be strictly positive");
    if (!(mu_r >= 1.0) || !std::isfinite(mu_r))
        throw numerical_input_error("linear_permeance: mu_r must be >= 1");
    return {mu_r * mu0 * geometry.area_m2 / geometry.length_m};
}

/// Air-gap permeance including fringing flux. The gap cross-section is taken
/// as square with side sqrt(A); fringing extends each lateral dimension by
/// one gap length, so A_eff = (sqrt(A) + g)^2 and P = mu0 A_eff / g.
inline Permeance gap_permeance_with_fringing(double gap_length_m, double area_m2) {
    if (!(gap_length_m > 0.0) || !(area_m2 > 0.0) || !std::isfinite(gap_length_m) ||
        !std::isfinite(area_m2))
        throw numerical_input_error("gap_permeance_with_fringing: inputs must be strictly positive");
    const double side = std::sqrt(area_m2);
    if (gap_length_m > 0.2 * side)
        std::fprintf(stderr,
                     "gcsim: warning: gap length %.4g m exceeds 20%% of core side %.4g m; "
                     "the one-gap-length fringing model loses accuracy\n",
                     gap_length_m, side);
    const double side_eff = side + gap_length_m;
    return {mu0 * side_eff * side_eff / gap_length_m};
}

/// Flux through a saturating leg as a function of the mmf across it:
/// Phi = A * B(mmf / l). Odd, strictly increasing, saturating toward
/// +-(B_sat A) + mu0 A H.
inline double flux_of_mmf(double mmf, const CoreLegGeometry& geometry,
                          const SaturationCurve& curve) {
    return geometry.area_m2 * curve.b_of_h(mmf / geometry.length_m);
}

/// Analytic dPhi/d(mmf); the Newton linearization of the saturating leg.
/// Maximal (= linear_permeance at mu_r) at mmf = 0, decaying toward
/// mu0 A / l in deep saturation.
inline Permeance differential_permeance(double mmf, const CoreLegGeometry& geometry,
                                        const SaturationCurve& curve) {
    return {geometry.area_m2 / geometry.length_m * curve.db_dh(mmf / geometry.length_m)};
}

/// EMF induced across a winding of N turns: v = N * dPhi/dt.
inline double winding_emf(int turns, double dphi_dt) {
    return static_cast<double>(turns) * dphi_dt;
}

} // namespace gcsim
