#pragma once

// =============================================================================
// Turns a sequence of accepted time points into named waveform channels.
//
// Channel naming, derived from element labels:
//   two-terminal element <l>:  v_<l> (terminal potential difference),
//                              i_<l> (branch flow: A, or Wb/s in the
//                              magnetic domain)
//   flux capacitor <l>:        additionally phi_<l>, the accumulated flux
//                              in Wb (trapezoid-integrated flux rate)
//   gyrator <l>:               i_<l> (electrical port current),
//                              v_<l>_terminal (electrical port voltage),
//                              mmf_<l> (magnetic port potential difference),
//                              dphi_<l> (flux rate delivered by the magnetic
//                              port into the external circuit)
// =============================================================================

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "gcsim/mna.hpp"
#include "gcsim/waveform.hpp"

namespace gcsim {

inline WaveformSet extract_channels(const Circuit& circuit, std::span<const SystemState> states) {
    if (states.empty()) throw numerical_input_error("extract_channels: empty state sequence");
    const SystemLayout layout = make_layout(circuit);

    double dt = 0.0;
    if (states.size() > 1) {
        dt = states[1].time - states[0].time;
        for (std::size_t i = 1; i < states.size(); ++i) {
            const double spacing = states[i].time - states[i - 1].time;
            if (std::abs(spacing - dt) > 1e-9 * std::max(1.0, std::abs(dt)))
                throw numerical_input_error("extract_channels: nonuniform time spacing at sample " +
                                            std::to_string(i));
        }
    }

    WaveformSet out;
    out.t0 = states[0].time;
    out.dt = dt;

    auto value_at = [&](const SystemState& s, NodeRef n) {
        const int row = layout.node_row[static_cast<std::size_t>(n.id)];
        return row >= 0 ? s.unknowns[row] : 0.0;
    };

    const std::size_t count = states.size();
    for (std::size_t k = 0; k < circuit.elements().size(); ++k) {
        const auto& e = circuit.elements()[k];
        const int aux = layout.element_aux[k];

        std::vector<double> v(count), i(count);
        std::vector<double> extra1, extra2;
        if (e.is<FluxCapacitor>()) extra1.resize(count);
        if (e.is<Gyrator>()) {
            extra1.resize(count);
            extra2.resize(count);
        }

        for (std::size_t s = 0; s < count; ++s) {
            const SystemState& st = states[s];
            const double pd = value_at(st, e.terminals[0]) - value_at(st, e.terminals[1]);
            v[s] = pd;
            if (e.is<Resistor>()) {
                i[s] = pd / e.as<Resistor>().resistance_ohm;
            } else if (e.is<Capacitor>()) {
                i[s] = st.history[k].rate;
            } else if (e.is<FluxCapacitor>()) {
                i[s] = st.history[k].rate;
                extra1[s] = st.history[k].flux_integral;
            } else if (e.is<Inductor>() || e.is<SourceDc>() || e.is<SourceSine>()) {
                i[s] = st.unknowns[aux];
            } else if (e.is<SourceCurrentDc>()) {
                i[s] = source_value(e.as<SourceCurrentDc>(), st.time);
            } else if (e.is<Gyrator>()) {
                i[s] = st.unknowns[aux];
                extra1[s] = value_at(st, e.terminals[2]) - value_at(st, e.terminals[3]);
                extra2[s] = -st.unknowns[aux + 1];
            }
        }

        if (e.is<Gyrator>()) {
            out.channels["i_" + e.label] = std::move(i);
            out.channels["v_" + e.label + "_terminal"] = std::move(v);
            out.channels["mmf_" + e.label] = std::move(extra1);
            out.channels["dphi_" + e.label] = std::move(extra2);
        } else {
            out.channels["v_" + e.label] = std::move(v);
            out.channels["i_" + e.label] = std::move(i);
            if (e.is<FluxCapacitor>()) out.channels["phi_" + e.label] = std::move(extra1);
        }
    }
    return out;
}

} // namespace gcsim
