// Command-line front end.
//
//   gcsim simulate <config-path> [--out DIR] [--full-waveforms]
//
// Exit codes: 0 ok, 1 config error, 2 solver nonconvergence, 3 I/O error.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "gcsim/gcsim.hpp"

int main(int argc, char** argv) {
    CLI::App app{"transient simulator for coupled electric-magnetic circuits "
                 "(gyrator-capacitor analogy) with a built-in CVSR model"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    bool full_waveforms = false;

    CLI::App* simulate = app.add_subcommand("simulate", "run the scenarios of a config file");
    simulate->add_option("config", config_path, "path to the run configuration")->required();
    simulate->add_option("--out", out_dir, "output directory (overrides output.dir)");
    simulate->add_flag("--full-waveforms", full_waveforms,
                       "also write <label>_full.csv covering the entire run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    std::ifstream in(config_path);
    if (!in) {
        std::fprintf(stderr, "error: cannot read config file '%s'\n", config_path.c_str());
        return 1;
    }
    std::stringstream buffer;
    buffer << in.rdbuf();

    try {
        gcsim::RunConfig config = gcsim::parse_config(buffer.str());
        if (!out_dir.empty()) config.output_dir = out_dir;
        if (full_waveforms) config.emit_full_waveforms = true;

        gcsim::RunOutcome outcome = gcsim::run(config);
        for (const auto& s : outcome.scenarios) {
            if (s.converged)
                std::printf("%-28s L_peak=%.4g H  L_mean=%.4g H  thd(i_ac)=%.3g%%  "
                            "v_dc dominant=%.4g Hz\n",
                            s.spec.label.c_str(), s.l_peak, s.l_mean, 100.0 * s.thd_i_ac,
                            s.v_dc_dominant_freq);
            else
                std::printf("%-28s FAILED: %s\n", s.spec.label.c_str(), s.error_message.c_str());
        }
        std::printf("outputs in %s\n", config.output_dir.c_str());
        return outcome.exit_code;
    } catch (const gcsim::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const gcsim::build_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 1;
    } catch (const gcsim::io_error& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return 3;
    } catch (const gcsim::solve_error& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return 2;
    } catch (const gcsim::error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
