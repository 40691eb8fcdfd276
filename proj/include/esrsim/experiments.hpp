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

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "esrsim/config.hpp"
#include "esrsim/ensemble.hpp"

// Reproduction runs of the three echo experiments. Each takes a resolved
// config document (see default_config) and returns plain tables that the
// CSV writers below turn into data files with a config header.

namespace esrsim {

struct Fig2Row {
    double sigma = 0.0;
    double plain_ratio = 0.0;
    double bb1_ratio = 0.0;
    double plain_echo = 0.0;
    double bb1_echo = 0.0;
};

/// Echo amplitude against amplitude error for plain and BB1 echoes, each
/// normalized to its own sigma = 0 amplitude.
std::vector<Fig2Row> run_fig2(const Json &config);

struct Fig3Row {
    double total_angle = 0.0;
    double plain_echo = 0.0;
    double bb1_echo = 0.0;
};

/// Nutation curves (in-phase echo) for plain and BB1 pulses on a shared
/// ensemble.
std::vector<Fig3Row> run_fig3(const Json &config);

struct NutationEnvelopes {
    double plain_at_pi = 0.0;
    double plain_at_5pi = 0.0;
    double bb1_at_pi = 0.0;
    double bb1_at_5pi = 0.0;

    /// plain_at_5pi / plain_at_pi
    double plain_decay() const { return plain_at_5pi / plain_at_pi; }
    /// (bb1_at_5pi / bb1_at_pi) / (plain_at_5pi / plain_at_pi)
    double bb1_gain() const { return (bb1_at_5pi / bb1_at_pi) / plain_decay(); }
};

NutationEnvelopes nutation_envelopes(const std::vector<Fig3Row> &rows, double half_width = kPi / 2.0);

struct Fig4Result {
    std::vector<CurvePoint> sweep;     ///< (a) field sweep of a single-tone echo
    std::vector<CurvePoint> spectrum;  ///< (b) DTFT magnitude of the comb echo
    EchoTrace trace;                   ///< (c) comb echo in the time domain
    std::vector<double> peaks_mhz;     ///< local maxima of the spectrum
    double waveform_peak_mhz = 0.0;    ///< max |IQ| of the compiled comb
};

enum Fig4Parts : unsigned { kFig4Sweep = 1, kFig4Spectrum = 2, kFig4Trace = 4, kFig4All = 7 };

Fig4Result run_fig4(const Json &config, unsigned parts = kFig4All);

/// The comb echo sequence described by a fig4 config.
PulseSequence fig4_comb_sequence(const Json &config, std::vector<double> offsets_mhz, double window_half_ns);

struct CustomResult {
    EchoTrace trace;
    std::vector<CurvePoint> sweep;
};

/// Runs config["sequence"]; the sweep covers config["sweep_offsets_mhz"].
CustomResult run_custom(const Json &config);

SimulationOptions simulation_options(const Json &config);

// --- CSV -------------------------------------------------------------------

void write_fig2_csv(std::ostream &os, const Json &config, const std::vector<Fig2Row> &rows);
void write_fig3_csv(std::ostream &os, const Json &config, const std::vector<Fig3Row> &rows);
void write_curve_csv(std::ostream &os, const Json &config, const std::vector<CurvePoint> &points,
                     const char *x_name, const char *y_name);
void write_trace_csv(std::ostream &os, const Json &config, const EchoTrace &trace);

/// Runs the experiment named by config["experiment"] and writes its data.
/// fig4 writes three files named <stem>_a, _b, _c with the extension of
/// out_path. Returns the paths written.
std::vector<std::string> run_experiment_to_files(const Json &config, const std::string &out_path);

/// Writes <data_path minus extension>.gp, a gnuplot script plotting every
/// data column of the CSV against the first. Returns the script path.
std::string write_plot_stub(const std::string &data_path);

}  // namespace esrsim
