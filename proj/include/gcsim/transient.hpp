#pragma once

// =============================================================================
// Implicit transient integration: consistent initial point, trapezoidal
// step with Newton-Raphson, and run orchestration to periodic steady state.
//
// Runs are strictly sequential and deterministic: identical circuit + config
// produce bit-identical results. Distinct runs may execute concurrently; they
// share only the immutable Circuit.
// =============================================================================

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gcsim/channels.hpp"
#include "gcsim/mna.hpp"
#include "gcsim/newton.hpp"
#include "gcsim/waveform.hpp"

namespace gcsim {

struct SolverConfig {
    double dt = 1e-5;               // requested step; run_transient snaps it to an
                                    // integer number of steps per source period
    double newton_tol_rel = 1e-9;
    double newton_tol_abs = 1e-12;
    int max_newton_iters = 50;
    int max_step_halvings = 8;
    int startup_ramp_cycles = 2;    // dc sources ramp linearly over these cycles
    int settle_cycles = 5;
    int analysis_cycles = 2;

    [[nodiscard]] std::string validation_message() const {
        if (!(dt > 0.0) || !std::isfinite(dt)) return "solver.dt must be positive";
        if (!(newton_tol_rel > 0.0) || !(newton_tol_abs > 0.0))
            return "newton tolerances must be positive";
        if (max_newton_iters < 1) return "solver.max_newton_iters must be >= 1";
        if (max_step_halvings < 0) return "solver.max_step_halvings must be >= 0";
        if (startup_ramp_cycles < 1 || settle_cycles < 1 || analysis_cycles < 1)
            return "solver cycle counts must be >= 1";
        return {};
    }

    [[nodiscard]] NewtonOptions newton_options() const {
        return {newton_tol_rel, newton_tol_abs, max_newton_iters, max_step_halvings};
    }
};

struct SolverStats {
    std::vector<int> newton_iterations;  // per accepted step
    std::vector<double> residual_norms;  // final Newton residual per step

    [[nodiscard]] int max_newton_iterations() const {
        int m = 0;
        for (int it : newton_iterations) m = std::max(m, it);
        return m;
    }
    [[nodiscard]] long total_newton_iterations() const {
        long t = 0;
        for (int it : newton_iterations) t += it;
        return t;
    }
};

struct TransientResult {
    WaveformSet waveforms;                      // analysis window, endpoints inclusive
    std::optional<WaveformSet> full_waveforms;  // entire run when requested
    SolverStats stats;
    double dt_effective = 0.0;
    int steps_per_cycle = 0;
    double fundamental_hz = 0.0;
};

/// Mid-run solver failure; carries whatever waveforms were accepted before
/// the failing step so the blow-up can be inspected.
class transient_run_error : public solve_error {
public:
    transient_run_error(const std::string& what, double time, WaveformSet partial)
        : solve_error(what), time(time), partial(std::move(partial)) {}
    double time;
    WaveformSet partial;
};

namespace detail {

inline std::vector<ElementHistory> histories_from_solution(const Circuit& circuit,
                                                           const SystemLayout& layout,
                                                           const SystemState& prev,
                                                           const Eigen::VectorXd& x, double dt,
                                                           StampMode mode) {
    auto value = [&](NodeRef n) {
        const int row = layout.node_row[static_cast<std::size_t>(n.id)];
        return row >= 0 ? x[row] : 0.0;
    };
    std::vector<ElementHistory> h(circuit.elements().size());
    for (std::size_t k = 0; k < circuit.elements().size(); ++k) {
        const auto& e = circuit.elements()[k];
        if (e.is<Capacitor>() || e.is<FluxCapacitor>()) {
            const double pd = value(e.terminals[0]) - value(e.terminals[1]);
            const double q = stored_charge(e, pd);
            if (mode == StampMode::initial_point) {
                h[k].stored = q;
                h[k].rate = x[layout.element_init_aux[k]];
                h[k].flux_integral = q;
            } else {
                const auto& p = prev.history[k];
                h[k].stored = q;
                h[k].rate = (2.0 / dt) * (q - p.stored) - p.rate;
                h[k].flux_integral = p.flux_integral + 0.5 * dt * (h[k].rate + p.rate);
            }
        } else if (e.is<Inductor>()) {
            const double i = x[layout.element_aux[k]];
            h[k].stored = e.as<Inductor>().inductance_h * i;
            h[k].rate = value(e.terminals[0]) - value(e.terminals[1]);
        }
    }
    return h;
}

} // namespace detail

/// Consistent state at t = 0: terminal voltages of (flux) capacitors pinned
/// to their initial values, inductor currents pinned, and the matching branch
/// currents solved for. Keeps the first trapezoidal step second-order even
/// with nonzero initial conditions.
inline SystemState initialize(const Circuit& circuit, const SolverConfig& config = {}) {
    const SystemLayout layout = make_layout(circuit);
    SystemState seed;
    seed.time = 0.0;
    seed.history.assign(circuit.elements().size(), {});

    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(layout.size(StampMode::initial_point));
    auto provider = [&](const Eigen::VectorXd& x, Eigen::VectorXd& F, Eigen::MatrixXd& J) {
        detail::assemble(circuit, layout, seed, x, 1.0, 0.0, StampMode::initial_point, F, J);
    };
    NewtonResult r = newton_solve(provider, x0, config.newton_options());

    SystemState state;
    state.time = 0.0;
    state.unknowns = r.x.head(layout.size(StampMode::transient));
    state.history =
        detail::histories_from_solution(circuit, layout, seed, r.x, 1.0, StampMode::initial_point);
    return state;
}

namespace detail {

struct StepOutcome {
    SystemState state;
    int newton_iterations = 0;
    double residual = 0.0;
};

inline StepOutcome step_once(const Circuit& circuit, const SystemLayout& layout,
                             const SystemState& state, const SolverConfig& config) {
    const double dt = config.dt;
    auto provider = [&](const Eigen::VectorXd& x, Eigen::VectorXd& F, Eigen::MatrixXd& J) {
        detail::assemble(circuit, layout, state, x, dt, state.time + dt, StampMode::transient, F,
                         J);
    };
    NewtonResult r;
    try {
        r = newton_solve(provider, state.unknowns, config.newton_options());
    } catch (const nonconvergence_error& e) {
        throw nonconvergence_error("step at t=" + std::to_string(state.time + dt) + ": " + e.what(),
                                   e.last_residual, e.iterations);
    } catch (const singular_matrix_error& e) {
        throw singular_matrix_error("step at t=" + std::to_string(state.time + dt) + ": " + e.what(),
                                    e.pivot_index);
    }

    StepOutcome out;
    out.state.time = state.time + dt;
    out.state.history = histories_from_solution(circuit, layout, state, r.x, dt, StampMode::transient);
    out.state.unknowns = std::move(r.x);
    out.newton_iterations = r.iterations;
    out.residual = r.residual;
    return out;
}

} // namespace detail

/// Advances one time step of config.dt with the trapezoidal companion models.
inline SystemState step(const Circuit& circuit, const SystemState& state,
                        const SolverConfig& config) {
    const SystemLayout layout = make_layout(circuit);
    return detail::step_once(circuit, layout, state, config).state;
}

struct FixedRun {
    std::vector<SystemState> states;  // states[0] is the initial point
    SolverStats stats;
};

/// Plain fixed-step run over [0, steps * config.dt]; building block for tests
/// and for run_transient.
inline FixedRun run_fixed(const Circuit& circuit, int steps, const SolverConfig& config) {
    const SystemLayout layout = make_layout(circuit);
    FixedRun run;
    run.states.reserve(static_cast<std::size_t>(steps) + 1);
    run.states.push_back(initialize(circuit, config));
    run.stats.newton_iterations.reserve(static_cast<std::size_t>(steps));
    run.stats.residual_norms.reserve(static_cast<std::size_t>(steps));
    for (int s = 0; s < steps; ++s) {
        try {
            auto out = detail::step_once(circuit, layout, run.states.back(), config);
            run.states.push_back(std::move(out.state));
            run.stats.newton_iterations.push_back(out.newton_iterations);
            run.stats.residual_norms.push_back(out.residual);
        } catch (const error& e) {
            WaveformSet partial;
            if (!run.states.empty()) partial = extract_channels(circuit, run.states);
            throw transient_run_error(e.what(), run.states.back().time + config.dt,
                                      std::move(partial));
        }
    }
    return run;
}

/// Ramp dc sources over startup_ramp_cycles, settle, then record the analysis
/// window: exactly analysis_cycles whole periods of the (first) sine source,
/// both endpoints included. The step is snapped to an integer number of steps
/// per period so spectral windows are leakage-free.
inline TransientResult run_transient(const Circuit& circuit, const SolverConfig& config,
                                     bool keep_full_waveforms = false) {
    if (!config.validation_message().empty()) throw config_error(config.validation_message());

    double f = 0.0;
    for (const auto& e : circuit.elements())
        if (e.is<SourceSine>()) {
            f = e.as<SourceSine>().frequency_hz;
            break;
        }
    if (!(f > 0.0))
        throw config_error("run_transient: circuit has no sine source to define the cycle length");

    const double period = 1.0 / f;
    const int steps_per_cycle = std::max(2, static_cast<int>(std::lround(period / config.dt)));
    SolverConfig effective = config;
    effective.dt = period / steps_per_cycle;

    // dc sources without an explicit ramp get the configured startup ramp
    Circuit ramped = circuit;
    const double ramp_time = config.startup_ramp_cycles * period;
    for (auto& e : ramped.elements_mutable()) {
        if (auto* s = std::get_if<SourceDc>(&e.params); s && s->ramp_time_s == 0.0)
            s->ramp_time_s = ramp_time;
        if (auto* s = std::get_if<SourceCurrentDc>(&e.params); s && s->ramp_time_s == 0.0)
            s->ramp_time_s = ramp_time;
    }

    const int total_cycles = config.startup_ramp_cycles + config.settle_cycles + config.analysis_cycles;
    const int total_steps = total_cycles * steps_per_cycle;
    FixedRun run = run_fixed(ramped, total_steps, effective);

    const std::size_t analysis_start =
        static_cast<std::size_t>(config.startup_ramp_cycles + config.settle_cycles) *
        static_cast<std::size_t>(steps_per_cycle);

    TransientResult result;
    result.dt_effective = effective.dt;
    result.steps_per_cycle = steps_per_cycle;
    result.fundamental_hz = f;
    result.stats = std::move(run.stats);
    result.waveforms = extract_channels(
        ramped, std::span<const SystemState>(run.states).subspan(analysis_start));
    if (keep_full_waveforms) result.full_waveforms = extract_channels(ramped, run.states);
    return result;
}

} // namespace gcsim
