// Copyright 2026 The esrsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: run experiments, export AWG waveforms, and sweep
// the field for a configured sequence.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "esrsim/composite.hpp"
#include "esrsim/config.hpp"
#include "esrsim/error.hpp"
#include "esrsim/experiments.hpp"
#include "esrsim/pulse.hpp"
#include "esrsim/spectrum.hpp"

namespace {

using esrsim::Json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitDomain = 2;
constexpr int kExitIo = 3;

struct ConfigFlags {
    std::string config_path;
    std::vector<double> sigma_grid;
    std::vector<double> offsets;
    std::string resonator;
    std::optional<int> packets;
    std::optional<std::uint64_t> seed;
    std::string error_scope;
    std::optional<unsigned> threads;

    void attach(CLI::App &app) {
        app.add_option("--config", config_path, "JSON config or a data file with a config header");
        app.add_option("--sigma-grid", sigma_grid, "comma-separated amplitude errors")->delimiter(',');
        app.add_option("--offsets", offsets, "comma-separated offsets in MHz")->delimiter(',');
        app.add_option("--resonator", resonator, "filter the drive through the resonator")
            ->check(CLI::IsMember({"on", "off"}));
        app.add_option("--packets", packets, "detuning packets in the ensemble");
        app.add_option("--seed", seed, "seed for random sampling");
        app.add_option("--error-scope", error_scope, "global|target-only");
        app.add_option("--threads", threads, "worker threads (0 = all cores)");
    }

    Json resolve(const std::string &experiment, bool offsets_are_sweep = false) const {
        Json patch = config_path.empty() ? Json::object() : esrsim::load_config(config_path);
        if (!patch.is_object()) {
            throw esrsim::ConfigError("config must be a JSON object");
        }
        std::string id = experiment;
        if (id.empty()) {
            id = patch.value("experiment", std::string("custom"));
        }
        Json resolved = esrsim::resolve_config(patch, id);
        if (!sigma_grid.empty()) {
            require_key(resolved, "sigma_grid", "--sigma-grid");
            resolved["sigma_grid"] = sigma_grid;
        }
        if (!offsets.empty()) {
            const char *key = offsets_are_sweep && resolved.contains("sweep_offsets_mhz") ? "sweep_offsets_mhz"
                                                                                           : "offsets_mhz";
            require_key(resolved, key, "--offsets");
            resolved[key] = offsets;
        }
        if (!resonator.empty()) {
            resolved["resonator"]["enabled"] = resonator == "on";
        }
        if (packets) {
            resolved["ensemble"]["n_packets"] = *packets;
        }
        if (seed) {
            resolved["seed"] = *seed;
        }
        if (!error_scope.empty()) {
            require_key(resolved, "error_scope", "--error-scope");
            esrsim::parse_error_scope(error_scope);
            resolved["error_scope"] = error_scope;
        }
        if (threads) {
            resolved["threads"] = *threads;
        }
        return resolved;
    }

    static void require_key(const Json &j, const char *key, const char *flag) {
        if (!j.contains(key)) {
            throw esrsim::ConfigError(std::string(flag) + " does not apply to experiment " +
                                      j.at("experiment").get<std::string>());
        }
    }
};

struct ExportFlags {
    std::string kind;
    std::string out;
    std::optional<double> theta;
    double phi = 0.0;
    std::optional<double> rabi;
    double tau = 300.0;
    double sigma = 0.0;
    int n = 0;
    bool use_bb1 = false;
    std::string error_scope = "global";
    std::vector<double> offsets{-20.0, -10.0, 0.0, 10.0, 20.0};
    std::string config_path;
};

esrsim::PulseSequence export_sequence(const ExportFlags &f) {
    using namespace esrsim;
    const double theta = f.theta.value_or(kPi);
    const double hard = f.rabi.value_or(38.46);
    const ErrorScope scope = parse_error_scope(f.error_scope);
    PulseSequence seq;
    if (f.kind == "rect") {
        seq.then(rect_pulse(theta, f.phi, hard));
    } else if (f.kind == "bb1") {
        seq = bb1(theta, hard);
    } else if (f.kind == "echo") {
        return plain_echo_with_error(hard, f.tau, f.sigma, scope);
    } else if (f.kind == "bb1-echo") {
        return bb1_echo_sequence(hard, f.tau, f.sigma, scope);
    } else if (f.kind == "nutation") {
        return inject_amplitude_error(nutation_sequence(theta, f.n, hard, f.tau, f.use_bb1), f.sigma, all_segments());
    } else if (f.kind == "comb") {
        seq.then(comb_superpose(gaussian_pulse(theta, f.phi, f.rabi.value_or(1.16)), f.offsets));
    } else if (f.kind == "custom") {
        if (f.config_path.empty()) {
            throw ConfigError("export custom needs --config");
        }
        return sequence_from_json(resolve_config(load_config(f.config_path), "custom").at("sequence"));
    }
    return inject_amplitude_error(seq, f.sigma, all_segments());
}

// Single-tone selective echo used by the field-sweep experiment.
Json default_sweep_sequence() {
    const Json fig4 = esrsim::default_config("fig4a");
    const double rabi = fig4.at("rabi_mhz").get<double>();
    const double exc = fig4.at("excitation_fwhm_ns").get<double>();
    const double trunc = fig4.at("truncation_factor").get<double>();
    const double tau = fig4.at("tau_ns").get<double>();
    return Json::array({
        {{"type", "gaussian"}, {"fwhm_ns", exc}, {"rabi_mhz", rabi}, {"truncation_factor", trunc}},
        {{"type", "delay"}, {"ns", tau}},
        {{"type", "gaussian"},
         {"fwhm_ns", fig4.at("refocus_fwhm_ns").get<double>()},
         {"rabi_mhz", rabi},
         {"truncation_factor", trunc}},
        {{"type", "delay"}, {"ns", tau}},
        {{"type", "acquire"},
         {"window_half_ns", fig4.at("sweep").at("window_half_ns").get<double>()},
         {"center_offset_ns", 0.5 * trunc * exc}},
    });
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Spin echo and composite pulse simulator"};
    app.require_subcommand(1);

    std::string experiment;
    std::string run_out;
    ConfigFlags run_flags;
    auto *run = app.add_subcommand("run", "run an experiment and write its data files");
    run->add_option("experiment,--experiment", experiment, "fig2|fig3|fig4|fig4a|fig4b|fig4c|custom");
    run->add_option("--out", run_out, "output CSV path");
    bool run_plot = false;
    run->add_flag("--plot", run_plot, "also write a gnuplot script per data file");
    run_flags.attach(*run);

    ExportFlags ex;
    auto *exp = app.add_subcommand("export", "write an AWG waveform (time_ns, I, Q)");
    exp->add_option("kind", ex.kind, "rect|bb1|echo|bb1-echo|nutation|comb|custom")
        ->required()
        ->check(CLI::IsMember({"rect", "bb1", "echo", "bb1-echo", "nutation", "comb", "custom"}));
    exp->add_option("--out", ex.out, "output path (stdout when omitted)");
    exp->add_option("--theta", ex.theta, "rotation angle in rad");
    exp->add_option("--phi", ex.phi, "rotation phase in rad");
    exp->add_option("--rabi", ex.rabi, "peak Rabi frequency in MHz");
    exp->add_option("--tau", ex.tau, "echo delay in ns");
    exp->add_option("--sigma", ex.sigma, "fractional amplitude error");
    exp->add_option("--n", ex.n, "number of 4pi paddings (nutation)");
    exp->add_flag("--bb1", ex.use_bb1, "use BB1 blocks (nutation)");
    exp->add_option("--error-scope", ex.error_scope, "global|target-only");
    exp->add_option("--offsets", ex.offsets, "comb offsets in MHz")->delimiter(',');
    exp->add_option("--config", ex.config_path, "config holding a custom sequence");

    std::string sweep_out;
    ConfigFlags sweep_flags;
    auto *sweep = app.add_subcommand("sweep", "field sweep of a configured echo");
    sweep->add_option("--out", sweep_out, "output CSV path");
    bool sweep_plot = false;
    sweep->add_flag("--plot", sweep_plot, "also write a gnuplot script");
    sweep_flags.attach(*sweep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (run->parsed()) {
            Json config = run_flags.resolve(experiment);
            const std::string out = run_out.empty() ? config.at("experiment").get<std::string>() + ".csv" : run_out;
            for (const auto &path : esrsim::run_experiment_to_files(config, out)) {
                std::cout << path << "\n";
                if (run_plot) {
                    std::cout << esrsim::write_plot_stub(path) << "\n";
                }
            }
        } else if (exp->parsed()) {
            const auto waveform = esrsim::compile(export_sequence(ex));
            if (ex.out.empty()) {
                esrsim::write_waveform(std::cout, waveform);
            } else {
                esrsim::write_waveform(ex.out, waveform);
            }
        } else if (sweep->parsed()) {
            Json config = sweep_flags.resolve("custom", true);
            if (config.at("sequence").empty()) {
                config["sequence"] = default_sweep_sequence();
                if (sweep_flags.offsets.empty()) {
                    config["sweep_offsets_mhz"] = esrsim::linspace_step(-40.0, 40.0, 2.0);
                }
                if (sweep_flags.config_path.empty()) {
                    config["ensemble"] = esrsim::default_config("fig4a").at("ensemble");
                    if (sweep_flags.packets) {
                        config["ensemble"]["n_packets"] = *sweep_flags.packets;
                    }
                }
            }
            const std::string out = sweep_out.empty() ? "sweep.csv" : sweep_out;
            const auto r = esrsim::run_custom(config);
            std::ofstream f(out, std::ios::binary);
            if (!f) {
                throw esrsim::IoError("cannot open " + out + " for writing");
            }
            esrsim::write_curve_csv(f, config, r.sweep, "offset_mhz", "echo_amplitude");
            f.flush();
            if (!f) {
                throw esrsim::IoError("failed writing " + out);
            }
            std::cout << out << "\n";
            if (sweep_plot) {
                std::cout << esrsim::write_plot_stub(out) << "\n";
            }
        }
    } catch (const esrsim::ConfigError &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Json::exception &e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const esrsim::IoError &e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDomain;
    }
    return kExitOk;
}
