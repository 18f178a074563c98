#pragma once

// =============================================================================
// Builder for a three-legged continuously variable series reactor (CVSR):
// an ac winding on the gapped middle leg in series with the ac source and
// load, and two dc control windings in series on the outer legs, wound in
// opposition so their ac-induced voltages subtract.
//
// Magnetic circuit (m_bot is the magnetic ground):
//
//        m_top ──────┬──────────────┬──────────────┐
//                 [left leg]     [mid leg]      [right leg]
//                    ml          m_gap2            mr
//                 [dc_left       [gap]          [dc_right
//                  port]         m_gap1           port]
//                    │           [ac port]          │
//        m_bot ──────┴──────────────┴──────────────┘
//
// Positive flux directions: up the middle leg, down each outer leg, so the
// accumulated channels satisfy phi_mid = phi_left + phi_right at all times.
// Winding senses are chosen so the channel v_dc_total (the voltage the dc
// bias source holds off) equals n_dc * (dphi_right/dt - dphi_left/dt).
// =============================================================================

#include <cmath>
#include <string>
#include <vector>

#include "gcsim/circuit.hpp"
#include "gcsim/waveform.hpp"

namespace gcsim {

struct CvsrParams {
    double l_mid = 0.4572;    // m, mean path of the middle leg (yokes absorbed)
    double l_outer = 0.8636;  // m, mean path of each outer leg
    double gap = 0.002014;    // m, air gap in the middle leg
    bool gap_fringing = true; // model fringing flux as an effective gap area increase
    double area = 0.0103;     // m^2, core cross-section
    int n_dc = 225;
    int n_ac = 150;
    double b_sat = 1.34;      // T
    double mu_r = 8000.0;     // unsaturated relative permeability
    double v_source = 1200.0; // V, sinusoid amplitude (peak unless v_source_is_rms)
    bool v_source_is_rms = false;
    double f = 60.0;          // Hz
    double r_load = 100.0;    // ohm
    double l_load = 0.130;    // H
    double i_dc_bias = 0.0;   // A

    [[nodiscard]] double v_source_peak() const {
        return v_source_is_rms ? v_source * std::sqrt(2.0) : v_source;
    }

    /// Names of fields violating the parameter invariants; empty when valid.
    [[nodiscard]] std::vector<std::string> invalid_fields() const {
        std::vector<std::string> bad;
        auto pos = [&](double v, const char* name) {
            if (!(v > 0.0) || !std::isfinite(v)) bad.emplace_back(name);
        };
        pos(l_mid, "l_mid");
        pos(l_outer, "l_outer");
        pos(gap, "gap");
        pos(area, "area");
        if (n_dc < 1) bad.emplace_back("n_dc");
        if (n_ac < 1) bad.emplace_back("n_ac");
        pos(b_sat, "b_sat");
        if (!(mu_r > 1.0) || !std::isfinite(mu_r)) bad.emplace_back("mu_r");
        if (!(v_source >= 0.0) || !std::isfinite(v_source)) bad.emplace_back("v_source");
        pos(f, "f");
        pos(r_load, "r_load");
        pos(l_load, "l_load");
        if (!std::isfinite(i_dc_bias)) bad.emplace_back("i_dc_bias");
        return bad;
    }
};

struct ScenarioSpec {
    std::string label;
    double v_source = 0.0;   // V
    double i_dc_bias = 0.0;  // A
};

struct CvsrBuildOptions {
    /// Replace the saturating legs by their initial-slope (linear) law.
    bool linear_core = false;
    /// Reverse the winding sense of both dc windings.
    bool flip_dc_windings = false;
};

/// The six reference operating points: {1.2 kV, 3.8 kV} x {0 A, 0.2 A, 10 A}.
/// 0.2 A is the critical bias: one outer leg rides the saturation boundary.
inline std::vector<ScenarioSpec> reference_scenarios() {
    return {
        {"zero_bias", 1200.0, 0.0},
        {"critical", 1200.0, 0.2},
        {"deep_saturation", 1200.0, 10.0},
        {"overvoltage_zero_bias", 3800.0, 0.0},
        {"overvoltage_critical", 3800.0, 0.2},
        {"overvoltage_deep_saturation", 3800.0, 10.0},
    };
}

inline Permeance cvsr_gap_permeance(const CvsrParams& p, bool with_fringing) {
    return with_fringing ? gap_permeance_with_fringing(p.gap, p.area)
                         : linear_permeance({p.gap, p.area}, 1.0);
}

/// Analytic unsaturated permeance seen by the ac winding: gap in series with
/// the middle leg, in series with the two outer legs in parallel, composed by
/// reluctance addition. The matching linear-mode inductance is n_ac^2 * P_eq.
inline Permeance equivalent_permeance_unsaturated(const CvsrParams& p, bool with_fringing) {
    const Permeance p_gap = cvsr_gap_permeance(p, with_fringing);
    const Permeance p_mid = linear_permeance({p.l_mid, p.area}, p.mu_r);
    const Permeance p_out = linear_permeance({p.l_outer, p.area}, p.mu_r);
    const double reluctance = 1.0 / p_gap.value + 1.0 / p_mid.value + 1.0 / (2.0 * p_out.value);
    return {1.0 / reluctance};
}

/// Fringing follows params.gap_fringing so the oracle always matches the
/// built circuit.
inline Permeance equivalent_permeance_unsaturated(const CvsrParams& p) {
    return equivalent_permeance_unsaturated(p, p.gap_fringing);
}

inline Circuit build_cvsr(const CvsrParams& params, const CvsrBuildOptions& options = {}) {
    if (auto bad = params.invalid_fields(); !bad.empty()) {
        std::string msg = "build_cvsr: invalid fields:";
        for (const auto& f : bad) msg += " " + f;
        throw build_error(msg);
    }

    // a practically infinite saturation point turns the same leg model linear
    SaturationCurve curve{options.linear_core ? 1e9 : params.b_sat, params.mu_r};
    const CoreLegGeometry mid_geom{params.l_mid, params.area};
    const CoreLegGeometry outer_geom{params.l_outer, params.area};
    const int dc_sense = options.flip_dc_windings ? -1 : +1;

    Circuit c;
    auto gnd_e = c.add_node(Domain::electrical);
    auto e1 = c.add_node(Domain::electrical);
    auto e2 = c.add_node(Domain::electrical);
    auto e3 = c.add_node(Domain::electrical);
    auto d1 = c.add_node(Domain::electrical);
    auto d2 = c.add_node(Domain::electrical);
    auto m_bot = c.add_node(Domain::magnetic);
    auto m_top = c.add_node(Domain::magnetic);
    auto m_gap1 = c.add_node(Domain::magnetic);
    auto m_gap2 = c.add_node(Domain::magnetic);
    auto ml = c.add_node(Domain::magnetic);
    auto mr = c.add_node(Domain::magnetic);
    c.set_ground(gnd_e);
    c.set_ground(m_bot);

    // ac circuit: source in series with the ac winding and the R-L load
    c.add_source_sine("src", e1, gnd_e, params.v_source_peak(), params.f);
    c.add_gyrator("ac", e1, e2, m_gap1, m_bot, WindingGyrator{params.n_ac, +1});
    c.add_resistor("r_load", e2, e3, params.r_load);
    c.add_inductor("l_load", e3, gnd_e, params.l_load);

    // middle magnetic branch, bottom to top: ac port, gap, saturating leg
    c.add_capacitor("gap", m_gap1, m_gap2, cvsr_gap_permeance(params, params.gap_fringing).value);
    c.add_flux_capacitor("mid", m_gap2, m_top, mid_geom, curve);

    // outer branches, top to bottom: saturating leg, dc winding port
    c.add_flux_capacitor("left", m_top, ml, outer_geom, curve);
    c.add_flux_capacitor("right", m_top, mr, outer_geom, curve);

    // dc control loop: ideal bias source through the two windings in series,
    // wound in opposition. The source terminal order follows the winding
    // sense so the channel v_dc_total always reads
    // n_dc * (dphi_right/dt - dphi_left/dt) for the build's own legs; the
    // injected bias direction is the same either way.
    if (dc_sense > 0)
        c.add_source_current_dc("dc_total", gnd_e, d1, params.i_dc_bias);
    else
        c.add_source_current_dc("dc_total", d1, gnd_e, -params.i_dc_bias);
    c.add_gyrator("dc_left", d1, d2, ml, m_bot, WindingGyrator{params.n_dc, -dc_sense});
    c.add_gyrator("dc_right", d2, gnd_e, mr, m_bot, WindingGyrator{params.n_dc, +dc_sense});

    return c;
}

/// Secondary inductance estimate from the instantaneous differential
/// permeances of the legs (an alternative to the flux-linkage-over-current
/// route): L(t) = n_ac^2 / (R_gap + R_mid(t) + R_left(t) || R_right(t)).
inline std::vector<double> differential_inductance_series(const CvsrParams& params,
                                                          const WaveformSet& waveforms,
                                                          const CvsrBuildOptions& options = {}) {
    const SaturationCurve curve{options.linear_core ? 1e9 : params.b_sat, params.mu_r};
    const CoreLegGeometry mid_geom{params.l_mid, params.area};
    const CoreLegGeometry outer_geom{params.l_outer, params.area};
    const double r_gap = 1.0 / cvsr_gap_permeance(params, params.gap_fringing).value;

    const auto& mmf_mid = waveforms.at("v_mid");
    const auto& mmf_left = waveforms.at("v_left");
    const auto& mmf_right = waveforms.at("v_right");

    std::vector<double> out(mmf_mid.size());
    const double n2 = static_cast<double>(params.n_ac) * static_cast<double>(params.n_ac);
    for (std::size_t k = 0; k < out.size(); ++k) {
        const double p_mid = differential_permeance(mmf_mid[k], mid_geom, curve).value;
        const double p_l = differential_permeance(mmf_left[k], outer_geom, curve).value;
        const double p_r = differential_permeance(mmf_right[k], outer_geom, curve).value;
        out[k] = n2 / (r_gap + 1.0 / p_mid + 1.0 / (p_l + p_r));
    }
    return out;
}

} // namespace gcsim
