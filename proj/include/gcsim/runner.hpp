#pragma once

// =============================================================================
// Scenario execution and file emission.
//
// Per scenario: <label>.csv with the fixed column set
//   t,i_ac,v_ac_terminal,B_mid,B_left,B_right,v_dc,L_inst
// over the analysis window (9 significant digits, scientific notation), and
// one summary.json with the per-scenario metrics. Numbers are formatted with
// a fixed "%.8e" so identical configs produce identical bytes. A scenario
// that fails to converge leaves its partial waveforms in <label>.csv.partial
// and is recorded in the summary with an error string.
// =============================================================================

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "gcsim/analysis.hpp"
#include "gcsim/config.hpp"
#include "gcsim/cvsr.hpp"
#include "gcsim/transient.hpp"

namespace gcsim {

struct ScenarioOutcome {
    ScenarioSpec spec;
    bool converged = false;
    std::string error_message;

    double l_peak = 0.0;
    double l_mean = 0.0;
    double p_dc = 0.0;
    double q_dc = 0.0;
    double s_dc = 0.0;
    double thd_i_ac = 0.0;
    double v_dc_dominant_freq = 0.0;
    double b_peak_mid = 0.0;
    double b_peak_left = 0.0;
    double b_peak_right = 0.0;

    long steps = 0;
    long newton_iters_total = 0;
    int newton_iters_max = 0;
    double dt_effective = 0.0;
};

struct RunOutcome {
    int exit_code = 0;  // 0 ok, 2 any scenario failed to converge
    std::vector<ScenarioOutcome> scenarios;
};

namespace detail {

inline std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.8e", x);
    return buf;
}

inline std::string json_number(double x) {
    return std::isfinite(x) ? fmt(x) : std::string("null");
}

inline double max_abs(const std::vector<double>& x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

/// The fixed CSV column set derived from a waveform set.
struct CsvColumns {
    std::vector<std::string> names{"t",      "i_ac",   "v_ac_terminal", "B_mid",
                                   "B_left", "B_right", "v_dc",          "L_inst"};
    std::vector<std::vector<double>> data;
};

inline CsvColumns make_columns(const WaveformSet& w, const CvsrParams& params) {
    CsvColumns out;
    const std::size_t n = w.samples();

    std::vector<double> t(n);
    for (std::size_t k = 0; k < n; ++k) t[k] = w.time_at(k);

    const auto& i_ac = w.at("i_ac");
    std::vector<double> lambda(n);
    for (std::size_t k = 0; k < n; ++k)
        lambda[k] = static_cast<double>(params.n_ac) * w.at("phi_mid")[k];

    std::vector<double> l_inst(n, 0.0);
    const double eps = 0.01 * max_abs(i_ac);
    if (eps > 0.0) {
        try {
            l_inst = equivalent_inductance(lambda, i_ac, eps).series;
        } catch (const error&) {
            // current stuck below the guard (diagnostic/partial output): leave zeros
        }
    }

    out.data.push_back(std::move(t));
    out.data.push_back(i_ac);
    out.data.push_back(w.at("v_ac_terminal"));
    out.data.push_back(flux_density(w.at("phi_mid"), params.area));
    out.data.push_back(flux_density(w.at("phi_left"), params.area));
    out.data.push_back(flux_density(w.at("phi_right"), params.area));
    out.data.push_back(w.at("v_dc_total"));
    out.data.push_back(std::move(l_inst));
    return out;
}

inline void write_csv(const std::filesystem::path& path, const CsvColumns& cols) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open for writing: " + path.string());
    for (std::size_t c = 0; c < cols.names.size(); ++c)
        f << (c ? "," : "") << cols.names[c];
    f << "\n";
    const std::size_t rows = cols.data.empty() ? 0 : cols.data.front().size();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols.data.size(); ++c)
            f << (c ? "," : "") << fmt(cols.data[c][r]);
        f << "\n";
    }
    if (!f.good()) throw io_error("write failed: " + path.string());
}

inline std::string json_escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        if (ch == '"' || ch == '\\') out += '\\';
        if (static_cast<unsigned char>(ch) < 0x20) continue;
        out += ch;
    }
    return out;
}

inline void analyze(ScenarioOutcome& o, const TransientResult& r, const CvsrParams& params) {
    const WaveformSet& w = r.waveforms;
    const auto& i_ac = w.at("i_ac");
    const auto& v_dc = w.at("v_dc_total");
    const auto& i_dc = w.at("i_dc_total");

    std::vector<double> lambda(w.samples());
    for (std::size_t k = 0; k < lambda.size(); ++k)
        lambda[k] = static_cast<double>(params.n_ac) * w.at("phi_mid")[k];
    InductanceResult li = equivalent_inductance(lambda, i_ac, 0.01 * max_abs(i_ac));
    o.l_peak = li.peak;
    o.l_mean = li.mean;

    PowerSummary ps = power_summary(v_dc, i_dc);
    o.p_dc = ps.p_real;
    o.q_dc = ps.q_reactive;
    o.s_dc = ps.s_apparent;

    o.thd_i_ac = spectrum(i_ac, r.dt_effective, r.fundamental_hz).thd;
    o.v_dc_dominant_freq = spectrum(v_dc, r.dt_effective, r.fundamental_hz).dominant_frequency;

    o.b_peak_mid = max_abs(flux_density(w.at("phi_mid"), params.area));
    o.b_peak_left = max_abs(flux_density(w.at("phi_left"), params.area));
    o.b_peak_right = max_abs(flux_density(w.at("phi_right"), params.area));

    o.steps = static_cast<long>(r.stats.newton_iterations.size());
    o.newton_iters_total = r.stats.total_newton_iterations();
    o.newton_iters_max = r.stats.max_newton_iterations();
    o.dt_effective = r.dt_effective;
}

inline void write_summary(const std::filesystem::path& path,
                          const std::vector<ScenarioOutcome>& outcomes) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open for writing: " + path.string());
    f << "{\n  \"scenarios\": [\n";
    for (std::size_t k = 0; k < outcomes.size(); ++k) {
        const auto& o = outcomes[k];
        f << "    {\n";
        f << "      \"label\": \"" << json_escape(o.spec.label) << "\",\n";
        f << "      \"v_source\": " << json_number(o.spec.v_source) << ",\n";
        f << "      \"i_dc_bias\": " << json_number(o.spec.i_dc_bias);
        if (o.converged) {
            f << ",\n";
            f << "      \"L_peak\": " << json_number(o.l_peak) << ",\n";
            f << "      \"L_mean\": " << json_number(o.l_mean) << ",\n";
            f << "      \"P_dc\": " << json_number(o.p_dc) << ",\n";
            f << "      \"Q_dc\": " << json_number(o.q_dc) << ",\n";
            f << "      \"S_dc\": " << json_number(o.s_dc) << ",\n";
            f << "      \"thd_i_ac\": " << json_number(o.thd_i_ac) << ",\n";
            f << "      \"v_dc_dominant_freq\": " << json_number(o.v_dc_dominant_freq) << ",\n";
            f << "      \"B_peaks\": {\"mid\": " << json_number(o.b_peak_mid)
              << ", \"left\": " << json_number(o.b_peak_left)
              << ", \"right\": " << json_number(o.b_peak_right) << "},\n";
            f << "      \"solver_stats\": {\"steps\": " << o.steps
              << ", \"newton_iters_total\": " << o.newton_iters_total
              << ", \"newton_iters_max\": " << o.newton_iters_max
              << ", \"dt_effective\": " << json_number(o.dt_effective) << "}\n";
        } else {
            f << ",\n      \"error\": \"" << json_escape(o.error_message) << "\"\n";
        }
        f << "    }" << (k + 1 < outcomes.size() ? "," : "") << "\n";
    }
    f << "  ]\n}\n";
    if (!f.good()) throw io_error("write failed: " + path.string());
}

inline std::vector<ScenarioSpec> resolve_scenarios(const RunConfig& config) {
    if (!config.sweep) return config.scenarios;
    const auto& s = *config.sweep;
    std::size_t width = std::to_string(s.steps - 1).size();
    std::vector<ScenarioSpec> out;
    for (int k = 0; k < s.steps; ++k) {
        const double frac = static_cast<double>(k) / static_cast<double>(s.steps - 1);
        std::string index = std::to_string(k);
        std::string label = "sweep_" + std::string(width - index.size(), '0') + index;
        out.push_back({std::move(label), config.cvsr.v_source,
                       s.i_dc_from + frac * (s.i_dc_to - s.i_dc_from)});
    }
    return out;
}

} // namespace detail

/// Runs every scenario of the config sequentially, writing per-scenario CSVs
/// and one summary.json into config.output_dir.
inline RunOutcome run(const RunConfig& config) {
    namespace fs = std::filesystem;
    if (!config.solver.validation_message().empty())
        throw config_error(config.solver.validation_message());

    std::error_code ec;
    fs::create_directories(config.output_dir, ec);
    if (ec) throw io_error("cannot create output directory: " + config.output_dir);

    RunOutcome outcome;
    for (const ScenarioSpec& spec : detail::resolve_scenarios(config)) {
        ScenarioOutcome o;
        o.spec = spec;

        CvsrParams params = config.cvsr;
        params.v_source = spec.v_source;
        params.i_dc_bias = spec.i_dc_bias;
        const Circuit circuit = build_cvsr(params);

        try {
            TransientResult r =
                run_transient(circuit, config.solver, config.emit_full_waveforms);
            detail::analyze(o, r, params);
            o.converged = true;
            detail::write_csv(fs::path(config.output_dir) / (spec.label + ".csv"),
                              detail::make_columns(r.waveforms, params));
            if (config.emit_full_waveforms && r.full_waveforms)
                detail::write_csv(fs::path(config.output_dir) / (spec.label + "_full.csv"),
                                  detail::make_columns(*r.full_waveforms, params));
        } catch (const transient_run_error& e) {
            o.converged = false;
            o.error_message = e.what();
            if (e.partial.samples() > 0)
                detail::write_csv(fs::path(config.output_dir) / (spec.label + ".csv.partial"),
                                  detail::make_columns(e.partial, params));
            outcome.exit_code = 2;
        }
        outcome.scenarios.push_back(std::move(o));
    }

    detail::write_summary(fs::path(config.output_dir) / "summary.json", outcome.scenarios);
    return outcome;
}

} // namespace gcsim
