#pragma once

// =============================================================================
// Modified nodal analysis over the two-domain graph.
//
// Unknown vector layout (transient mode):
//   [ node potentials of all non-ground nodes, in node-id order ]
//   [ auxiliary branch currents, in element order:
//       voltage sources        -> 1 slot (A)
//       inductors              -> 1 slot (A)
//       gyrators               -> 2 slots (electrical port current in A,
//                                 magnetic port flow in Wb/s) ]
//
// Initial-point mode appends one auxiliary current per (flux) capacitor so
// their terminal potentials can be pinned to the stated initial values and
// the consistent branch currents recovered; everything else stamps the same.
//
// Reactive elements integrate with the charge-conserving trapezoidal rule
//   stored_{n+1} - stored_n = (dt/2) (rate_{n+1} + rate_n)
// where (stored, rate) is (q, i) for capacitors, (Phi, dPhi/dt) for flux
// capacitors and (lambda, v) for inductors.
// =============================================================================

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "gcsim/circuit.hpp"
#include "gcsim/errors.hpp"

namespace gcsim {

enum class StampMode { transient, initial_point };

struct SystemLayout {
    std::vector<int> node_row;      // node id -> row, -1 for grounds
    std::vector<int> element_aux;   // element index -> first aux row, -1 if none
    std::vector<int> element_init_aux;  // initial-point aux row for (flux) capacitors
    int node_unknowns = 0;
    int aux_unknowns = 0;
    int init_extra = 0;

    [[nodiscard]] int size(StampMode mode) const {
        return node_unknowns + aux_unknowns + (mode == StampMode::initial_point ? init_extra : 0);
    }
};

inline SystemLayout make_layout(const Circuit& circuit) {
    SystemLayout l;
    l.node_row.assign(static_cast<std::size_t>(circuit.node_count()), -1);
    int row = 0;
    for (int id = 0; id < circuit.node_count(); ++id)
        if (!circuit.is_ground(id)) l.node_row[static_cast<std::size_t>(id)] = row++;
    l.node_unknowns = row;

    l.element_aux.assign(circuit.elements().size(), -1);
    for (std::size_t k = 0; k < circuit.elements().size(); ++k) {
        const auto& e = circuit.elements()[k];
        int slots = 0;
        if (e.is<SourceDc>() || e.is<SourceSine>() || e.is<Inductor>()) slots = 1;
        if (e.is<Gyrator>()) slots = 2;
        if (slots > 0) {
            l.element_aux[k] = l.node_unknowns + l.aux_unknowns;
            l.aux_unknowns += slots;
        }
    }

    l.element_init_aux.assign(circuit.elements().size(), -1);
    for (std::size_t k = 0; k < circuit.elements().size(); ++k) {
        const auto& e = circuit.elements()[k];
        if (e.is<Capacitor>() || e.is<FluxCapacitor>()) {
            l.element_init_aux[k] = l.node_unknowns + l.aux_unknowns + l.init_extra;
            ++l.init_extra;
        }
    }
    return l;
}

/// History of one reactive element at an accepted time point.
struct ElementHistory {
    double stored = 0.0;         // q [C], Phi [Wb], or lambda [Wb-t]
    double rate = 0.0;           // i [A], dPhi/dt [Wb/s], or v [V]
    double flux_integral = 0.0;  // flux capacitors: trapezoid-integrated flux, cross-checks `stored`
};

struct SystemState {
    Eigen::VectorXd unknowns;  // transient layout
    double time = 0.0;
    std::vector<ElementHistory> history;  // one slot per element (unused for non-reactive)
};

/// Newton correction system: `matrix` is the Jacobian at the candidate and
/// `rhs` is minus the residual, so matrix * delta = rhs steps toward the
/// solution of the companion network.
struct LinearSystem {
    Eigen::MatrixXd matrix;
    Eigen::VectorXd rhs;
};

/// Startup ramp, 0 -> 1 over [0, ramp_time]. Smoothstep rather than linear:
/// the slope is continuous at both ends, which matters because a slope jump
/// permanently rings the undamped trapezoidal flux-rate modes of lossless
/// loops (an ideal current source gives the dc winding loop no damping path).
inline double source_ramp(double t, double ramp_time) {
    if (ramp_time <= 0.0) return 1.0;
    if (t <= 0.0) return 0.0;
    if (t >= ramp_time) return 1.0;
    const double u = t / ramp_time;
    return u * u * (3.0 - 2.0 * u);
}

inline double source_value(const SourceDc& s, double t) { return s.volts * source_ramp(t, s.ramp_time_s); }
inline double source_value(const SourceCurrentDc& s, double t) { return s.amps * source_ramp(t, s.ramp_time_s); }
inline double source_value(const SourceSine& s, double t) {
    return s.amplitude_v * std::sin(2.0 * std::numbers::pi * s.frequency_hz * t + s.phase_rad);
}

inline double stored_charge(const Element& e, double pd) {
    if (e.is<Capacitor>()) return e.as<Capacitor>().value * pd;
    const auto& f = e.as<FluxCapacitor>();
    return flux_of_mmf(pd, f.geometry, f.curve);
}

inline double charge_slope(const Element& e, double pd) {
    if (e.is<Capacitor>()) return e.as<Capacitor>().value;
    const auto& f = e.as<FluxCapacitor>();
    return differential_permeance(pd, f.geometry, f.curve).value;
}

namespace detail {

/// Assembles residual F and Jacobian J of the companion network at the
/// candidate vector. `t_eval` is the time the sources are evaluated at.
inline void assemble(const Circuit& circuit, const SystemLayout& layout,
                     const SystemState& state, const Eigen::VectorXd& x, double dt,
                     double t_eval, StampMode mode, Eigen::VectorXd& F, Eigen::MatrixXd& J) {
    const int n = layout.size(mode);
    F.setZero(n);
    J.setZero(n, n);

    auto row_of = [&](NodeRef nr) { return layout.node_row[static_cast<std::size_t>(nr.id)]; };
    auto value = [&](int row) { return row >= 0 ? x[row] : 0.0; };
    auto addF = [&](int row, double v) { if (row >= 0) F[row] += v; };
    auto addJ = [&](int r, int c, double v) { if (r >= 0 && c >= 0) J(r, c) += v; };

    // Conductance-like stamp: branch flow g*(pd) from n1 into n2.
    auto stamp_flow = [&](int r1, int r2, double flow, double g) {
        addF(r1, flow);
        addF(r2, -flow);
        addJ(r1, r1, g);
        addJ(r1, r2, -g);
        addJ(r2, r1, -g);
        addJ(r2, r2, g);
    };
    // Auxiliary branch current x[a] flowing from n1 into n2.
    auto stamp_aux_flow = [&](int r1, int r2, int a) {
        addF(r1, x[a]);
        addF(r2, -x[a]);
        addJ(r1, a, 1.0);
        addJ(r2, a, -1.0);
    };

    for (std::size_t k = 0; k < circuit.elements().size(); ++k) {
        const auto& e = circuit.elements()[k];
        const int aux = layout.element_aux[k];
        const int r1 = e.terminals.size() >= 2 ? row_of(e.terminals[0]) : -1;
        const int r2 = e.terminals.size() >= 2 ? row_of(e.terminals[1]) : -1;
        const double pd = value(r1) - value(r2);

        if (e.is<Resistor>()) {
            const double g = 1.0 / e.as<Resistor>().resistance_ohm;
            stamp_flow(r1, r2, g * pd, g);
        } else if (e.is<Capacitor>() || e.is<FluxCapacitor>()) {
            if (mode == StampMode::transient) {
                const auto& h = state.history[k];
                const double q = stored_charge(e, pd);
                const double flow = (2.0 / dt) * (q - h.stored) - h.rate;
                const double g = (2.0 / dt) * charge_slope(e, pd);
                stamp_flow(r1, r2, flow, g);
            } else {
                const int a = layout.element_init_aux[k];
                const double v0 = e.is<Capacitor>() ? e.as<Capacitor>().initial_voltage : 0.0;
                stamp_aux_flow(r1, r2, a);
                F[a] += pd - v0;
                addJ(a, r1, 1.0);
                addJ(a, r2, -1.0);
            }
        } else if (e.is<Inductor>()) {
            stamp_aux_flow(r1, r2, aux);
            const double L = e.as<Inductor>().inductance_h;
            if (mode == StampMode::transient) {
                const auto& h = state.history[k];
                // L i_{n+1} = lambda_n + (dt/2)(v_{n+1} + v_n)
                F[aux] += x[aux] - (h.stored + 0.5 * dt * (pd + h.rate)) / L;
                addJ(aux, aux, 1.0);
                addJ(aux, r1, -0.5 * dt / L);
                addJ(aux, r2, 0.5 * dt / L);
            } else {
                F[aux] += x[aux] - e.as<Inductor>().initial_current_a;
                addJ(aux, aux, 1.0);
            }
        } else if (e.is<SourceDc>() || e.is<SourceSine>()) {
            stamp_aux_flow(r1, r2, aux);
            const double v = e.is<SourceDc>() ? source_value(e.as<SourceDc>(), t_eval)
                                              : source_value(e.as<SourceSine>(), t_eval);
            F[aux] += pd - v;
            addJ(aux, r1, 1.0);
            addJ(aux, r2, -1.0);
        } else if (e.is<SourceCurrentDc>()) {
            const double i = source_value(e.as<SourceCurrentDc>(), t_eval);
            addF(r1, i);
            addF(r2, -i);
        } else if (e.is<Gyrator>()) {
            const auto& w = e.as<Gyrator>().winding;
            const double g = static_cast<double>(w.orientation) / static_cast<double>(w.turns);
            const int re1 = r1, re2 = r2;
            const int rm1 = row_of(e.terminals[2]);
            const int rm2 = row_of(e.terminals[3]);
            const int a_ie = aux;      // electrical port current
            const int a_w = aux + 1;   // magnetic port flow
            stamp_aux_flow(re1, re2, a_ie);
            stamp_aux_flow(rm1, rm2, a_w);
            // Cross transconductances of magnitude 1/N; the sign pairing makes
            // the two-port instantaneous power sum exactly to zero:
            //   i_e = g * mmf        (=> mmf = s N i_e)
            //   w   = -g * v_e       (=> v_e = -s N w)
            const double mmf = value(rm1) - value(rm2);
            F[a_ie] += x[a_ie] - g * mmf;
            addJ(a_ie, a_ie, 1.0);
            addJ(a_ie, rm1, -g);
            addJ(a_ie, rm2, g);
            F[a_w] += x[a_w] + g * pd;
            addJ(a_w, a_w, 1.0);
            addJ(a_w, re1, g);
            addJ(a_w, re2, -g);
        }
    }
}

} // namespace detail

/// Jacobian + residual-correction system of the trapezoidal companion network
/// for the step from state.time to state.time + dt, evaluated at `candidate`.
inline LinearSystem stamp_system(const Circuit& circuit, const SystemState& state,
                                 const Eigen::VectorXd& candidate, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw numerical_input_error("stamp_system: dt must be positive and finite");
    for (Eigen::Index i = 0; i < candidate.size(); ++i)
        if (!std::isfinite(candidate[i]))
            throw numerical_input_error("stamp_system: candidate entry " + std::to_string(i) +
                                        " is not finite");
    const SystemLayout layout = make_layout(circuit);
    if (candidate.size() != layout.size(StampMode::transient))
        throw numerical_input_error("stamp_system: candidate size does not match circuit layout");

    LinearSystem sys;
    Eigen::VectorXd F;
    detail::assemble(circuit, layout, state, candidate, dt, state.time + dt,
                     StampMode::transient, F, sys.matrix);
    sys.rhs = -F;
    return sys;
}

} // namespace gcsim
