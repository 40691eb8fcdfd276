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

#include "esrsim/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <fstream>
#include <ostream>
#include <sstream>

#include "esrsim/composite.hpp"
#include "esrsim/diagnostics.hpp"
#include "esrsim/error.hpp"
#include "esrsim/spectrum.hpp"

namespace esrsim {
namespace {

std::vector<double> number_list(const Json &config, const char *key) {
    const Json &v = config.at(key);
    if (!v.is_array()) {
        throw ConfigError(std::string("config key '") + key + "' must be a list of numbers");
    }
    std::vector<double> out;
    for (const auto &x : v) {
        if (!x.is_number()) {
            throw ConfigError(std::string("config key '") + key + "' must be a list of numbers");
        }
        out.push_back(x.get<double>());
    }
    return out;
}

std::string row(std::initializer_list<double> values) {
    std::string out;
    char buf[40];
    bool first = true;
    for (double v : values) {
        std::snprintf(buf, sizeof buf, "%.10g", v);
        if (!first) {
            out += ',';
        }
        out += buf;
        first = false;
    }
    out += '\n';
    return out;
}

void write_file(const std::string &path, const std::function<void(std::ostream &)> &body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw IoError("cannot open " + path + " for writing");
    }
    body(f);
    f.flush();
    if (!f) {
        throw IoError("failed writing " + path);
    }
}

std::string with_suffix(const std::string &path, const char *suffix) {
    std::filesystem::path p(path);
    std::filesystem::path out = p.parent_path() / (p.stem().string() + suffix + p.extension().string());
    return out.string();
}

}  // namespace

SimulationOptions simulation_options(const Json &config) {
    SimulationOptions opts;
    opts.compile.dt_ns = get_number(config, "/dt_ns");
    opts.resonator = resonator_from_json(config.at("resonator"));
    opts.carrier_offset_mhz = get_number(config, "/resonator/carrier_offset_mhz");
    const double threads = get_number(config, "/threads");
    if (threads < 0) {
        throw ConfigError("threads must be >= 0");
    }
    opts.threads = static_cast<unsigned>(threads);
    return opts;
}

namespace {

EnsembleSpec ensemble_of(const Json &config) {
    EnsembleSpec spec = ensemble_from_json(config.at("ensemble"));
    spec.seed = static_cast<std::uint64_t>(get_number(config, "/seed"));
    return spec;
}

}  // namespace

std::vector<Fig2Row> run_fig2(const Json &config) {
    const double rabi = get_number(config, "/rabi_mhz");
    const double tau = get_number(config, "/tau_ns");
    const AcquisitionWindow window{get_number(config, "/window_half_ns")};
    const ErrorScope scope = parse_error_scope(config.at("error_scope").get<std::string>());
    const auto sigmas = number_list(config, "sigma_grid");
    for (double s : sigmas) {
        if (!(s > -1.0 && s <= 1.0)) {
            throw DomainError("sigma grid values must lie in (-1, 1]");
        }
    }
    const auto packets = build_ensemble(ensemble_of(config));
    const auto opts = simulation_options(config);

    auto plain = [&](double s) {
        return simulate_echo(plain_echo_with_error(rabi, tau, s, scope, window), packets, opts).echo_amplitude;
    };
    auto composite = [&](double s) {
        return simulate_echo(bb1_echo_sequence(rabi, tau, s, scope, window), packets, opts).echo_amplitude;
    };
    const double plain_ref = plain(0.0);
    const double bb1_ref = composite(0.0);

    std::vector<Fig2Row> rows;
    for (double s : sigmas) {
        Fig2Row r;
        r.sigma = s;
        r.plain_echo = s == 0.0 ? plain_ref : plain(s);
        r.bb1_echo = s == 0.0 ? bb1_ref : composite(s);
        r.plain_ratio = r.plain_echo / plain_ref;
        r.bb1_ratio = r.bb1_echo / bb1_ref;
        rows.push_back(r);
    }
    return rows;
}

std::vector<Fig3Row> run_fig3(const Json &config) {
    const double rabi = get_number(config, "/rabi_mhz");
    const double tau = get_number(config, "/tau_ns");
    const double window = get_number(config, "/window_half_ns");
    const double step = get_number(config, "/angle_step_pi");
    const double max = get_number(config, "/angle_max_pi");
    std::vector<double> angles;
    for (double a : linspace_step(0.0, max, step)) {
        angles.push_back(a * kPi);
    }
    const auto packets = build_ensemble(ensemble_of(config));
    auto opts = simulation_options(config);
    opts.metric = EchoMetric::InPhase;

    const auto plain = nutation_curve(angles, packets, false, rabi, tau, opts, window);
    const auto composite = nutation_curve(angles, packets, true, rabi, tau, opts, window);
    std::vector<Fig3Row> rows;
    for (std::size_t i = 0; i < angles.size(); ++i) {
        rows.push_back({angles[i], plain[i].echo, composite[i].echo});
    }
    return rows;
}

NutationEnvelopes nutation_envelopes(const std::vector<Fig3Row> &rows, double half_width) {
    std::vector<CurvePoint> plain, composite;
    for (const auto &r : rows) {
        plain.push_back({r.total_angle, r.plain_echo});
        composite.push_back({r.total_angle, r.bb1_echo});
    }
    NutationEnvelopes e;
    e.plain_at_pi = nutation_envelope(plain, kPi, half_width);
    e.plain_at_5pi = nutation_envelope(plain, 5.0 * kPi, half_width);
    e.bb1_at_pi = nutation_envelope(composite, kPi, half_width);
    e.bb1_at_5pi = nutation_envelope(composite, 5.0 * kPi, half_width);
    return e;
}

PulseSequence fig4_comb_sequence(const Json &config, std::vector<double> offsets_mhz, double window_half_ns) {
    CombEchoParams p;
    p.offsets_mhz = std::move(offsets_mhz);
    p.rabi_mhz = get_number(config, "/rabi_mhz");
    p.excitation_fwhm_ns = get_number(config, "/excitation_fwhm_ns");
    p.refocus_fwhm_ns = get_number(config, "/refocus_fwhm_ns");
    p.truncation_factor = get_number(config, "/truncation_factor");
    p.tau_ns = get_number(config, "/tau_ns");
    p.window = AcquisitionWindow{window_half_ns};
    return comb_echo_sequence(p);
}

Fig4Result run_fig4(const Json &config, unsigned parts) {
    const auto offsets = number_list(config, "offsets_mhz");
    if (offsets.empty()) {
        throw DomainError("fig4 needs at least one offset");
    }
    const auto packets = build_ensemble(ensemble_of(config));
    const auto opts = simulation_options(config);
    Fig4Result result;

    const auto comb = fig4_comb_sequence(config, offsets, get_number(config, "/trace_window_half_ns"));
    result.waveform_peak_mhz = peak_amplitude(compile(comb, opts.compile));
    const double ceiling = get_number(config, "/amplifier_ceiling_mhz");
    if (ceiling > 0.0 && result.waveform_peak_mhz > ceiling) {
        char msg[128];
        std::snprintf(msg, sizeof msg, "comb peak %.4g MHz exceeds the amplifier ceiling %.4g MHz",
                      result.waveform_peak_mhz, ceiling);
        warn(msg);
    }

    if (parts & (kFig4Spectrum | kFig4Trace)) {
        result.trace = simulate_echo(comb, packets, opts);
    }
    if (parts & kFig4Spectrum) {
        const auto freqs = linspace_step(get_number(config, "/spectrum/lo_mhz"), get_number(config, "/spectrum/hi_mhz"),
                                         get_number(config, "/spectrum/step_mhz"));
        const auto mags = trace_spectrum(result.trace, freqs);
        for (std::size_t i = 0; i < freqs.size(); ++i) {
            result.spectrum.push_back({freqs[i], mags[i]});
        }
        for (std::size_t i : local_maxima(mags, 0.1)) {
            result.peaks_mhz.push_back(freqs[i]);
        }
    }
    if (parts & kFig4Sweep) {
        const auto single = fig4_comb_sequence(config, {0.0}, get_number(config, "/sweep/window_half_ns"));
        const auto grid = linspace_step(get_number(config, "/sweep/lo_mhz"), get_number(config, "/sweep/hi_mhz"),
                                        get_number(config, "/sweep/step_mhz"));
        result.sweep = field_sweep_spectrum(single, packets, grid, opts);
    }
    return result;
}

CustomResult run_custom(const Json &config) {
    const auto seq = sequence_from_json(config.at("sequence"));
    if (seq.empty()) {
        throw ConfigError("custom experiment needs a non-empty 'sequence'");
    }
    const auto packets = build_ensemble(ensemble_of(config));
    auto opts = simulation_options(config);
    const auto metric = config.at("metric").get<std::string>();
    if (metric == "magnitude") {
        opts.metric = EchoMetric::Magnitude;
    } else if (metric == "in-phase") {
        opts.metric = EchoMetric::InPhase;
    } else {
        throw ConfigError("unknown metric '" + metric + "' (expected magnitude|in-phase)");
    }
    opts.detection_phase_rad = get_number(config, "/detection_phase_rad");
    CustomResult r;
    r.trace = simulate_echo(seq, packets, opts);
    const auto offsets = number_list(config, "sweep_offsets_mhz");
    r.sweep = field_sweep_spectrum(seq, packets, offsets, opts);
    return r;
}

void write_fig2_csv(std::ostream &os, const Json &config, const std::vector<Fig2Row> &rows) {
    os << config_header(config) << "sigma,plain_ratio,bb1_ratio,plain_echo,bb1_echo\n";
    for (const auto &r : rows) {
        os << row({r.sigma, r.plain_ratio, r.bb1_ratio, r.plain_echo, r.bb1_echo});
    }
}

void write_fig3_csv(std::ostream &os, const Json &config, const std::vector<Fig3Row> &rows) {
    os << config_header(config) << "total_angle_rad,plain_echo,bb1_echo\n";
    for (const auto &r : rows) {
        os << row({r.total_angle, r.plain_echo, r.bb1_echo});
    }
}

void write_curve_csv(std::ostream &os, const Json &config, const std::vector<CurvePoint> &points, const char *x_name,
                     const char *y_name) {
    os << config_header(config) << x_name << ',' << y_name << '\n';
    for (const auto &p : points) {
        os << row({p.x, p.echo});
    }
}

void write_trace_csv(std::ostream &os, const Json &config, const EchoTrace &trace) {
    os << config_header(config) << "time_ns,re,im\n";
    for (std::size_t k = 0; k < trace.samples.size(); ++k) {
        const double t = trace.start_ns + static_cast<double>(k) * trace.dt_ns;
        os << row({t, trace.samples[k].real(), trace.samples[k].imag()});
    }
}

std::vector<std::string> run_experiment_to_files(const Json &config, const std::string &out_path) {
    const auto id = config.at("experiment").get<std::string>();
    if (id == "fig2") {
        const auto rows = run_fig2(config);
        write_file(out_path, [&](std::ostream &os) { write_fig2_csv(os, config, rows); });
        return {out_path};
    }
    if (id == "fig3") {
        const auto rows = run_fig3(config);
        write_file(out_path, [&](std::ostream &os) { write_fig3_csv(os, config, rows); });
        return {out_path};
    }
    if (id == "fig4a") {
        const auto r = run_fig4(config, kFig4Sweep);
        write_file(out_path, [&](std::ostream &os) { write_curve_csv(os, config, r.sweep, "offset_mhz", "echo_amplitude"); });
        return {out_path};
    }
    if (id == "fig4b") {
        const auto r = run_fig4(config, kFig4Spectrum);
        write_file(out_path, [&](std::ostream &os) { write_curve_csv(os, config, r.spectrum, "freq_mhz", "magnitude"); });
        return {out_path};
    }
    if (id == "fig4c") {
        const auto r = run_fig4(config, kFig4Trace);
        write_file(out_path, [&](std::ostream &os) { write_trace_csv(os, config, r.trace); });
        return {out_path};
    }
    if (id == "fig4") {
        const auto r = run_fig4(config, kFig4All);
        // Each part file restates a config that regenerates just that part.
        std::vector<std::string> paths;
        const char *suffix[] = {"_a", "_b", "_c"};
        for (int part = 0; part < 3; ++part) {
            Json c = config;
            c["experiment"] = std::string("fig4") + static_cast<char>('a' + part);
            const std::string path = with_suffix(out_path, suffix[part]);
            write_file(path, [&](std::ostream &os) {
                if (part == 0) {
                    write_curve_csv(os, c, r.sweep, "offset_mhz", "echo_amplitude");
                } else if (part == 1) {
                    write_curve_csv(os, c, r.spectrum, "freq_mhz", "magnitude");
                } else {
                    write_trace_csv(os, c, r.trace);
                }
            });
            paths.push_back(path);
        }
        return paths;
    }
    if (id == "custom") {
        const auto r = run_custom(config);
        write_file(out_path, [&](std::ostream &os) { write_trace_csv(os, config, r.trace); });
        return {out_path};
    }
    throw ConfigError("unknown experiment '" + id + "'");
}

std::string write_plot_stub(const std::string &data_path) {
    std::ifstream in(data_path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + data_path);
    }
    std::string line;
    while (std::getline(in, line) && !line.empty() && line[0] == '#') {
    }
    std::vector<std::string> columns;
    std::istringstream cols(line);
    for (std::string c; std::getline(cols, c, ',');) {
        columns.push_back(c);
    }
    if (columns.size() < 2) {
        throw IoError(data_path + " has no data columns");
    }
    std::filesystem::path script(data_path);
    script.replace_extension(".gp");
    const std::string data_name = std::filesystem::path(data_path).filename().string();
    write_file(script.string(), [&](std::ostream &os) {
        os << "set datafile separator ','\n"
           << "set key autotitle columnheader\n"
           << "set xlabel '" << columns[0] << "'\n"
           << "plot";
        for (std::size_t c = 1; c < columns.size(); ++c) {
            os << (c > 1 ? "," : "") << " '" << data_name << "' using 1:" << c + 1 << " with lines";
        }
        os << "\n";
    });
    return script.string();
}

}  // namespace esrsim
