#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gcsim/channels.hpp"
#include "gcsim/newton.hpp"
#include "gcsim/transient.hpp"
#include "test_util.hpp"

using namespace gcsim;

TEST_CASE("newton: scalar quadratic root") {
    auto provider = [](const Eigen::VectorXd& x, Eigen::VectorXd& F, Eigen::MatrixXd& J) {
        F.resize(1);
        J.resize(1, 1);
        F[0] = x[0] * x[0] - 4.0;
        J(0, 0) = 2.0 * x[0];
    };
    Eigen::VectorXd x0(1);
    x0[0] = 3.0;
    NewtonResult r = newton_solve(provider, x0, NewtonOptions{});
    CHECK(r.x[0] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(r.iterations <= 8);
}

TEST_CASE("newton: linear system converges in exactly one iteration") {
    Eigen::MatrixXd a(2, 2);
    a << 3.0, 1.0, -1.0, 2.0;
    Eigen::VectorXd b(2);
    b << 5.0, 1.0;
    auto provider = [&](const Eigen::VectorXd& x, Eigen::VectorXd& F, Eigen::MatrixXd& J) {
        F = a * x - b;
        J = a;
    };
    NewtonResult r = newton_solve(provider, Eigen::VectorXd::Zero(2), NewtonOptions{});
    CHECK(r.iterations == 1);
    CHECK((a * r.x - b).norm() < 1e-12);
}

TEST_CASE("newton: rootless residual reports nonconvergence") {
    auto provider = [](const Eigen::VectorXd& x, Eigen::VectorXd& F, Eigen::MatrixXd& J) {
        F.resize(1);
        J.resize(1, 1);
        F[0] = x[0] * x[0] + 1.0;
        J(0, 0) = 2.0 * x[0];
    };
    Eigen::VectorXd x0(1);
    x0[0] = 1.0;
    CHECK_THROWS_AS(newton_solve(provider, x0, NewtonOptions{}), nonconvergence_error);
}

TEST_CASE("newton: damping walks a flat arctangent residual home") {
    auto provider = [](const Eigen::VectorXd& x, Eigen::VectorXd& F, Eigen::MatrixXd& J) {
        F.resize(1);
        J.resize(1, 1);
        F[0] = std::atan(50.0 * x[0]) - 0.5;
        J(0, 0) = 50.0 / (1.0 + 2500.0 * x[0] * x[0]);
    };
    Eigen::VectorXd x0(1);
    x0[0] = 2.0;
    NewtonResult r = newton_solve(provider, x0, NewtonOptions{});
    CHECK(r.x[0] == doctest::Approx(std::tan(0.5) / 50.0).epsilon(1e-8));
}

TEST_CASE("lu_solve reports the singular pivot index") {
    Eigen::MatrixXd a(3, 3);
    a << 1.0, 2.0, 3.0, 2.0, 4.0, 6.0, 0.0, 1.0, -1.0;  // rows 0,1 dependent
    Eigen::VectorXd b = Eigen::VectorXd::Ones(3);
    try {
        (void)lu_solve(a, b);
        FAIL("expected singular_matrix_error");
    } catch (const singular_matrix_error& e) {
        CHECK(e.pivot_index >= 0);
        CHECK(e.pivot_index < 3);
    }
}

TEST_CASE("singular circuit (current source into a dead-end node) raises singularity") {
    Circuit c;
    auto g = c.add_node(Domain::electrical);
    auto n1 = c.add_node(Domain::electrical);
    c.set_ground(g);
    c.add_source_current_dc("i", g, n1, 1.0);

    SystemState s;
    s.unknowns = Eigen::VectorXd::Zero(1);
    s.time = 0.0;
    s.history.assign(1, {});
    SolverConfig cfg;
    CHECK_THROWS_AS(step(c, s, cfg), singular_matrix_error);
}

TEST_CASE("RC discharge follows the closed-form exponential") {
    Circuit c;
    auto g = c.add_node(Domain::electrical);
    auto n1 = c.add_node(Domain::electrical);
    c.set_ground(g);
    c.add_capacitor("c", n1, g, 1.0, /*initial_voltage=*/1.0);
    c.add_resistor("r", n1, g, 1.0);

    SolverConfig cfg;
    cfg.dt = 1e-3;
    FixedRun run = run_fixed(c, 1000, cfg);
    const auto layout = make_layout(c);
    const int row = layout.node_row[static_cast<std::size_t>(n1.id)];
    CHECK(run.states.front().unknowns[row] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(run.states.back().unknowns[row] == doctest::Approx(std::exp(-1.0)).epsilon(1e-4));
    // consistent initial point: capacitor current starts at -v0/R
    CHECK(run.states.front().history[0].rate == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("RL with sine source matches the phasor solution after settling") {
    const double v_pk = 100.0, f = 60.0, r_ohm = 10.0, l_h = 0.05;
    Circuit c;
    auto g = c.add_node(Domain::electrical);
    auto n1 = c.add_node(Domain::electrical);
    auto n2 = c.add_node(Domain::electrical);
    c.set_ground(g);
    c.add_source_sine("src", n1, g, v_pk, f);
    c.add_resistor("r", n1, n2, r_ohm);
    c.add_inductor("l", n2, g, l_h);

    const int spc = 1000;
    SolverConfig cfg;
    cfg.dt = (1.0 / f) / spc;
    const int cycles = 12;
    FixedRun run = run_fixed(c, cycles * spc, cfg);
    WaveformSet w = extract_channels(c, run.states);

    // last two whole periods
    const std::size_t start = static_cast<std::size_t>((cycles - 2) * spc);
    std::vector<double> tail(w.at("i_l").begin() + static_cast<std::ptrdiff_t>(start),
                             w.at("i_l").end() - 1);
    testutil::Harmonic h = testutil::fit_fundamental(tail, w.time_at(start), cfg.dt, f);

    const double omega = 2.0 * std::numbers::pi * f;
    const double z = std::hypot(r_ohm, omega * l_h);
    const double amp_expected = v_pk / z;
    const double phase_expected = -std::atan2(omega * l_h, r_ohm);
    CHECK(h.amplitude == doctest::Approx(amp_expected).epsilon(1e-3));
    CHECK(h.phase == doctest::Approx(phase_expected).epsilon(1e-3));

    // trapezoidal branch law holds between accepted steps
    const auto layout = make_layout(c);
    const int aux = layout.element_aux[2];
    const int r1 = layout.node_row[static_cast<std::size_t>(n2.id)];
    for (std::size_t k = 500; k < 510; ++k) {
        const double i_prev = run.states[k].unknowns[aux];
        const double i_next = run.states[k + 1].unknowns[aux];
        const double v_prev = run.states[k].unknowns[r1];
        const double v_next = run.states[k + 1].unknowns[r1];
        const double lhs = l_h * (i_next - i_prev);
        const double rhs = 0.5 * cfg.dt * (v_next + v_prev);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
    }
}

TEST_CASE("trapezoidal dt-refinement shows second-order convergence") {
    // saturating winding: sine source, series resistor, gyrator onto a
    // flux-capacitor leg driven well into the knee
    auto make = [] {
        Circuit c;
        auto g = c.add_node(Domain::electrical);
        auto n1 = c.add_node(Domain::electrical);
        auto n2 = c.add_node(Domain::electrical);
        auto gm = c.add_node(Domain::magnetic);
        auto m1 = c.add_node(Domain::magnetic);
        c.set_ground(g);
        c.set_ground(gm);
        c.add_source_sine("src", n1, g, 300.0, 60.0);
        c.add_resistor("r", n1, n2, 20.0);
        c.add_gyrator("w", n2, g, m1, gm, WindingGyrator{100, +1});
        c.add_flux_capacitor("leg", m1, gm, {0.4, 0.005}, {1.2, 4000.0});
        return c;
    };
    Circuit c = make();
    CHECK(validate(c).empty());

    const double f = 60.0;
    const int base_spc = 200;
    const int cycles = 3;
    auto run_with = [&](int mult) {
        SolverConfig cfg;
        cfg.dt = (1.0 / f) / (base_spc * mult);
        return run_fixed(c, cycles * base_spc * mult, cfg);
    };
    FixedRun r1 = run_with(1), r2 = run_with(2), r8 = run_with(8);

    const auto layout = make_layout(c);
    const int aux = layout.element_aux[2];  // gyrator electrical current
    // coarse run with multiplier m has states at t = k*dt_m; the matching
    // reference index in r8 is k * (8/m). Error measured over the last cycle.
    auto rms_err = [&](const FixedRun& coarse, int mult) {
        const std::size_t ratio = static_cast<std::size_t>(8 / mult);
        double acc = 0.0;
        int count = 0;
        for (std::size_t k = static_cast<std::size_t>((cycles - 1) * base_spc * mult);
             k < coarse.states.size(); ++k) {
            const double d = coarse.states[k].unknowns[aux] - r8.states[k * ratio].unknowns[aux];
            acc += d * d;
            ++count;
        }
        return std::sqrt(acc / count);
    };
    const double e1 = rms_err(r1, 1);
    const double e2 = rms_err(r2, 2);

    const double order = std::log2(e1 / e2);
    CHECK(order > 1.8);
    CHECK(order < 2.2);
}

TEST_CASE("run_transient bookkeeping: exact analysis window and determinism") {
    Circuit c;
    auto g = c.add_node(Domain::electrical);
    auto n1 = c.add_node(Domain::electrical);
    auto n2 = c.add_node(Domain::electrical);
    c.set_ground(g);
    c.add_source_sine("src", n1, g, 50.0, 60.0);
    c.add_resistor("r", n1, n2, 5.0);
    c.add_inductor("l", n2, g, 0.02);

    SolverConfig cfg;
    cfg.dt = 1e-4;
    cfg.startup_ramp_cycles = 1;
    cfg.settle_cycles = 2;
    cfg.analysis_cycles = 2;
    TransientResult a = run_transient(c, cfg);
    TransientResult b = run_transient(c, cfg);

    CHECK(a.steps_per_cycle == 167);  // round((1/60)/1e-4)
    CHECK(a.dt_effective * a.steps_per_cycle == doctest::Approx(1.0 / 60.0).epsilon(1e-15));
    CHECK(a.waveforms.samples() ==
          static_cast<std::size_t>(cfg.analysis_cycles * a.steps_per_cycle) + 1);
    CHECK(a.waveforms.t0 ==
          doctest::Approx((cfg.startup_ramp_cycles + cfg.settle_cycles) / 60.0).epsilon(1e-12));
    CHECK(a.stats.max_newton_iterations() <= cfg.max_newton_iters);

    for (const auto& [name, samples] : a.waveforms.channels) {
        const auto& other = b.waveforms.at(name);
        REQUIRE(other.size() == samples.size());
        for (std::size_t k = 0; k < samples.size(); ++k) {
            CHECK(samples[k] == other[k]);  // bit-identical
        }
    }
}

TEST_CASE("nonconvergence mid-run carries partial waveforms and a timestamp") {
    Circuit c;
    auto g = c.add_node(Domain::electrical);
    auto n1 = c.add_node(Domain::electrical);
    auto gm = c.add_node(Domain::magnetic);
    auto m1 = c.add_node(Domain::magnetic);
    c.set_ground(g);
    c.set_ground(gm);
    c.add_source_sine("src", n1, g, 500.0, 60.0);
    c.add_gyrator("w", n1, g, m1, gm, WindingGyrator{100, +1});
    c.add_flux_capacitor("leg", m1, gm, {0.4, 0.005}, {1.2, 4000.0});

    SolverConfig cfg;
    cfg.dt = 1e-4;
    cfg.max_newton_iters = 1;  // starve the nonlinear solve
    try {
        run_fixed(c, 200, cfg);
        FAIL("expected transient_run_error");
    } catch (const transient_run_error& e) {
        CHECK(std::string(e.what()).find("t=") != std::string::npos);
        CHECK(e.partial.samples() >= 1);
    }
}
