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

#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "esrsim/pulse.hpp"
#include "esrsim/resonator.hpp"
#include "esrsim/su2.hpp"

// Inhomogeneously broadened ensembles of independent spin packets driven by
// a compiled waveform. Each packet obeys the rotating-frame Bloch equation
//
//   dm/dt = Omega x m - relaxation,
//   Omega = 2 pi (b1_scale * I(t), b1_scale * Q(t), detuning)
//
// with equilibrium magnetization +z of unit length. Every 0.1 ns sample is
// propagated as half a relaxation step, the exact rotation for the constant
// field over the sample, then another half relaxation step.

namespace esrsim {

inline constexpr double kInfiniteTime = std::numeric_limits<double>::infinity();

struct SpinPacket {
    double detuning_mhz = 0.0;
    double b1_scale = 1.0;
    double weight = 1.0;
    double t1_ns = kInfiniteTime;
    double t2_ns = kInfiniteTime;

    /// Throws DomainError unless weight >= 0, t1 > 0, t2 > 0 and 2 t1 >= t2.
    void validate() const;
};

struct GaussianLine {
    double fwhm_mhz = 9.35;
};
struct LorentzianLine {
    double fwhm_mhz = 9.35;
};
/// Explicit (detuning MHz, weight) list. Weights are renormalized to sum 1.
struct TabulatedLine {
    std::vector<std::pair<double, double>> entries;
};
using Lineshape = std::variant<GaussianLine, LorentzianLine, TabulatedLine>;

struct DeltaB1 {};
/// Gaussian spread of the drive scale around 1, discretized on `points`
/// equally spaced values over +-3 relative_sd.
struct GaussianB1 {
    double relative_sd = 0.05;
    int points = 9;
};
using B1Distribution = std::variant<DeltaB1, GaussianB1>;

enum class Sampling {
    Quadrature,  ///< deterministic equally spaced grid with exact cell masses
    Random,      ///< n_packets draws with equal weights from a seeded generator
};

struct EnsembleSpec {
    Lineshape lineshape = GaussianLine{};
    int n_packets = 601;  ///< detuning points; ignored for TabulatedLine
    B1Distribution b1 = DeltaB1{};
    double t1_ns = 1e6;
    double t2_ns = 200.0;
    Sampling sampling = Sampling::Quadrature;
    std::uint64_t seed = 0;
};

/// Quadrature: detunings equally spaced over +-3 FWHM (Gaussian) or +-8 FWHM
/// (Lorentzian). Each packet weighs the lineshape probability mass of its
/// grid cell; weights are normalized to sum 1. A GaussianB1 spread forms a
/// detuning-major tensor product with the detuning grid. Warns when fewer
/// than 11 detuning points are requested.
std::vector<SpinPacket> build_ensemble(const EnsembleSpec &spec);

/// Per-sample trajectory of one packet: element k is the state after k
/// samples, so the result has samples + 1 entries.
std::vector<BlochVector> evolve_packet(const SpinPacket &packet, const SampledWaveform &waveform,
                                       BlochVector initial = {});

enum class EchoMetric {
    Magnitude,  ///< |mean of the trace over the window|
    InPhase,    ///< mean projected on the detection phase (signed)
};

struct EchoTrace {
    double dt_ns = kAwgGridNs;
    double start_ns = 0.0;   ///< time of samples[0] from sequence start
    double center_ns = 0.0;  ///< nominal echo center
    std::vector<std::complex<double>> samples;  ///< ensemble mean of mx + i my
    double echo_amplitude = 0.0;
    EchoMetric metric = EchoMetric::Magnitude;
};

struct SimulationOptions {
    CompileOptions compile{};
    EchoMetric metric = EchoMetric::Magnitude;
    /// Transverse direction counted as positive signal by EchoMetric::InPhase.
    /// pi/2 is +y, where a [pi/2]_0 - [pi]_0 echo forms.
    double detection_phase_rad = kPi / 2.0;
    /// Filter the compiled waveform through a resonator before driving.
    std::optional<ResonatorModel> resonator{};
    double carrier_offset_mhz = 0.0;
    /// Added to every packet detuning (field sweep).
    double detuning_shift_mhz = 0.0;
    /// Worker threads; 0 picks std::thread::hardware_concurrency().
    unsigned threads = 0;
};

/// Evolves every packet from +z and records the weighted mean transverse
/// magnetization on the sample grid over the window of the sequence's first
/// Acquire marker. Results do not depend on the thread count. Throws
/// DomainError if the sequence has no Acquire marker.
EchoTrace simulate_echo(const PulseSequence &seq, std::span<const SpinPacket> packets,
                        const SimulationOptions &opts = {});
EchoTrace simulate_echo(const PulseSequence &seq, const EnsembleSpec &spec, const SimulationOptions &opts = {});

/// Same as simulate_echo but driven by an already compiled waveform.
/// `acquire_ns` is the marker's grid time.
EchoTrace simulate_waveform(const SampledWaveform &waveform, double acquire_ns, const Acquire &acquire,
                            std::span<const SpinPacket> packets, const SimulationOptions &opts = {});

struct CurvePoint {
    double x = 0.0;
    double echo = 0.0;
};

/// Echo amplitude of nutation_sequence for every total angle in theta_grid
/// (each split into a head angle and 4 pi paddings).
std::vector<CurvePoint> nutation_curve(std::span<const double> theta_grid, std::span<const SpinPacket> packets,
                                       bool use_bb1, double rabi_mhz, double tau_ns,
                                       const SimulationOptions &opts = {}, double window_half_ns = 100.0);

/// Largest |echo| among points with |x - center| <= half_width.
double nutation_envelope(std::span<const CurvePoint> curve, double center, double half_width = kPi / 2.0);

/// Echo amplitude with every packet detuning shifted by each sweep offset.
std::vector<CurvePoint> field_sweep_spectrum(const PulseSequence &seq, std::span<const SpinPacket> packets,
                                             std::span<const double> sweep_offsets_mhz,
                                             const SimulationOptions &opts = {});

}  // namespace esrsim
