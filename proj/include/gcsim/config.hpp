#pragma once

// =============================================================================
// Run configuration: flat key = value text with dotted section prefixes.
//
//   cvsr.n_ac = 150          # device parameter override
//   solver.dt = 1e-5
//   scenarios = reference    # the six built-in operating points (default)
//   scenario.mylabel.v_source = 1200
//   scenario.mylabel.i_dc_bias = 0.25
//   sweep.i_dc_from = 0      # sweep and explicit scenarios are exclusive
//   sweep.i_dc_to = 10
//   sweep.i_dc_steps = 21
//   output.dir = out
//   output.full_waveforms = false
//
// Parsing is total: every input yields either a RunConfig or a config_error
// diagnostic with a line reference. Unknown keys are rejected.
// =============================================================================

#include <cctype>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gcsim/cvsr.hpp"
#include "gcsim/errors.hpp"
#include "gcsim/transient.hpp"

namespace gcsim {

struct SweepSpec {
    double i_dc_from = 0.0;
    double i_dc_to = 0.0;
    int steps = 0;
};

struct RunConfig {
    CvsrParams cvsr;
    SolverConfig solver;
    std::vector<ScenarioSpec> scenarios;  // resolved scenario list
    std::optional<SweepSpec> sweep;
    std::string output_dir = "out";
    bool emit_full_waveforms = false;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

[[noreturn]] inline void fail(int line, const std::string& msg) {
    throw config_error("config line " + std::to_string(line) + ": " + msg);
}

inline double parse_double(const std::string& v, int line, const std::string& key) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0') fail(line, "value of '" + key + "' is not a number");
    return x;
}

inline int parse_int(const std::string& v, int line, const std::string& key) {
    char* end = nullptr;
    const long x = std::strtol(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0') fail(line, "value of '" + key + "' is not an integer");
    return static_cast<int>(x);
}

inline bool parse_bool(const std::string& v, int line, const std::string& key) {
    if (v == "true") return true;
    if (v == "false") return false;
    fail(line, "value of '" + key + "' must be true or false");
}

} // namespace detail

inline RunConfig parse_config(const std::string& text) {
    using detail::fail;
    RunConfig cfg;

    struct PartialScenario {
        std::optional<double> v_source;
        std::optional<double> i_dc_bias;
        int line = 0;
    };
    std::vector<std::string> scenario_order;
    std::map<std::string, PartialScenario> scenario_parts;
    std::map<std::string, int> seen;  // key -> first line
    bool keyword_scenarios = false;
    std::optional<double> sweep_from, sweep_to;
    std::optional<int> sweep_steps;

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string line = text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
        pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty()) fail(line_no, "empty key");
        if (value.empty()) fail(line_no, "empty value for '" + key + "'");

        if (auto it = seen.find(key); it != seen.end())
            fail(line_no, "duplicate key '" + key + "' (first set on line " +
                              std::to_string(it->second) + ")");
        seen[key] = line_no;

        auto num = [&] { return detail::parse_double(value, line_no, key); };
        auto integer = [&] { return detail::parse_int(value, line_no, key); };
        auto boolean = [&] { return detail::parse_bool(value, line_no, key); };
        auto positive = [&](double x, const char* field) {
            if (!(x > 0.0) || !std::isfinite(x))
                fail(line_no, std::string(field) + " out of range: must be strictly positive");
            return x;
        };

        if (key == "cvsr.l_mid") cfg.cvsr.l_mid = positive(num(), "l_mid");
        else if (key == "cvsr.l_outer") cfg.cvsr.l_outer = positive(num(), "l_outer");
        else if (key == "cvsr.gap") cfg.cvsr.gap = positive(num(), "gap");
        else if (key == "cvsr.gap_fringing") cfg.cvsr.gap_fringing = boolean();
        else if (key == "cvsr.area") cfg.cvsr.area = positive(num(), "area");
        else if (key == "cvsr.n_dc") {
            cfg.cvsr.n_dc = integer();
            if (cfg.cvsr.n_dc < 1) fail(line_no, "n_dc out of range: must be >= 1");
        } else if (key == "cvsr.n_ac") {
            cfg.cvsr.n_ac = integer();
            if (cfg.cvsr.n_ac < 1) fail(line_no, "n_ac out of range: must be >= 1");
        } else if (key == "cvsr.b_sat") cfg.cvsr.b_sat = positive(num(), "b_sat");
        else if (key == "cvsr.mu_r") {
            cfg.cvsr.mu_r = num();
            if (!(cfg.cvsr.mu_r > 1.0)) fail(line_no, "mu_r out of range: must be > 1");
        } else if (key == "cvsr.v_source") {
            cfg.cvsr.v_source = num();
            if (!(cfg.cvsr.v_source >= 0.0)) fail(line_no, "v_source out of range: must be >= 0");
        } else if (key == "cvsr.v_source_is_rms") cfg.cvsr.v_source_is_rms = boolean();
        else if (key == "cvsr.f") cfg.cvsr.f = positive(num(), "f");
        else if (key == "cvsr.r_load") cfg.cvsr.r_load = positive(num(), "r_load");
        else if (key == "cvsr.l_load") cfg.cvsr.l_load = positive(num(), "l_load");
        else if (key == "cvsr.i_dc_bias") cfg.cvsr.i_dc_bias = num();
        else if (key == "solver.dt") cfg.solver.dt = positive(num(), "dt");
        else if (key == "solver.newton_tol_rel") cfg.solver.newton_tol_rel = positive(num(), "newton_tol_rel");
        else if (key == "solver.newton_tol_abs") cfg.solver.newton_tol_abs = positive(num(), "newton_tol_abs");
        else if (key == "solver.max_newton_iters") {
            cfg.solver.max_newton_iters = integer();
            if (cfg.solver.max_newton_iters < 1) fail(line_no, "max_newton_iters out of range");
        } else if (key == "solver.max_step_halvings") {
            cfg.solver.max_step_halvings = integer();
            if (cfg.solver.max_step_halvings < 0) fail(line_no, "max_step_halvings out of range");
        } else if (key == "solver.startup_ramp_cycles") {
            cfg.solver.startup_ramp_cycles = integer();
            if (cfg.solver.startup_ramp_cycles < 1) fail(line_no, "startup_ramp_cycles out of range");
        } else if (key == "solver.settle_cycles") {
            cfg.solver.settle_cycles = integer();
            if (cfg.solver.settle_cycles < 1) fail(line_no, "settle_cycles out of range");
        } else if (key == "solver.analysis_cycles") {
            cfg.solver.analysis_cycles = integer();
            if (cfg.solver.analysis_cycles < 1) fail(line_no, "analysis_cycles out of range");
        } else if (key == "scenarios") {
            if (value != "reference")
                fail(line_no, "scenarios: only the keyword 'reference' is understood");
            keyword_scenarios = true;
        } else if (key.rfind("scenario.", 0) == 0) {
            const std::string rest = key.substr(9);
            const auto dot = rest.find('.');
            if (dot == std::string::npos || dot == 0)
                fail(line_no, "scenario keys look like scenario.<label>.<field>");
            const std::string label = rest.substr(0, dot);
            const std::string field = rest.substr(dot + 1);
            for (char ch : label)
                if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '_' && ch != '-')
                    fail(line_no, "scenario label '" + label +
                                      "' may only contain letters, digits, '_' and '-'");
            auto [it, fresh] = scenario_parts.try_emplace(label);
            if (fresh) {
                scenario_order.push_back(label);
                it->second.line = line_no;
            }
            if (field == "v_source") {
                it->second.v_source = num();
                if (!(*it->second.v_source >= 0.0)) fail(line_no, "v_source out of range");
            } else if (field == "i_dc_bias") {
                it->second.i_dc_bias = num();
                if (!std::isfinite(*it->second.i_dc_bias)) fail(line_no, "i_dc_bias out of range");
            } else {
                fail(line_no, "unknown key '" + key + "'");
            }
        } else if (key == "sweep.i_dc_from") sweep_from = num();
        else if (key == "sweep.i_dc_to") sweep_to = num();
        else if (key == "sweep.i_dc_steps") {
            sweep_steps = integer();
            if (*sweep_steps < 2) fail(line_no, "i_dc_steps out of range: must be >= 2 when sweeping");
        } else if (key == "output.dir") cfg.output_dir = value;
        else if (key == "output.full_waveforms") cfg.emit_full_waveforms = boolean();
        else fail(line_no, "unknown key '" + key + "'");
    }

    const bool has_sweep = sweep_from || sweep_to || sweep_steps;
    if (has_sweep) {
        if (!(sweep_from && sweep_to && sweep_steps))
            throw config_error("config: sweep needs all of i_dc_from, i_dc_to, i_dc_steps");
        if (keyword_scenarios || !scenario_parts.empty())
            throw config_error("config: sweep and scenarios are mutually exclusive");
        cfg.sweep = SweepSpec{*sweep_from, *sweep_to, *sweep_steps};
        return cfg;
    }

    if (keyword_scenarios && !scenario_parts.empty())
        throw config_error(
            "config: 'scenarios = reference' and explicit scenario sections are mutually exclusive");

    if (!scenario_parts.empty()) {
        for (const auto& label : scenario_order) {
            const auto& part = scenario_parts.at(label);
            if (!part.v_source || !part.i_dc_bias)
                throw config_error("config: scenario '" + label +
                                   "' needs both v_source and i_dc_bias (started on line " +
                                   std::to_string(part.line) + ")");
            cfg.scenarios.push_back({label, *part.v_source, *part.i_dc_bias});
        }
    } else {
        cfg.scenarios = reference_scenarios();
    }
    return cfg;
}

} // namespace gcsim
