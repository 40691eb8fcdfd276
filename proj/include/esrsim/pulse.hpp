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
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "esrsim/units.hpp"

// Symbolic pulse programs and their compilation to complex baseband IQ
// samples. Waveform amplitudes are Rabi frequencies in MHz: the real part is
// the x component of omega_1 / 2pi, the imaginary part the y component.

namespace esrsim {

struct Rectangular {
    double duration_ns = 0.0;
};

/// Unit-peak Gaussian of the given FWHM, truncated symmetrically to a window
/// of truncation_ns.
struct Gaussian {
    double fwhm_ns = 0.0;
    double truncation_ns = 0.0;
};

using Envelope = std::variant<Rectangular, Gaussian>;

/// Total length of the envelope window in ns.
double envelope_duration(const Envelope &env);

/// Time integral of the peak-normalized envelope over its window, in ns.
double envelope_area(const Envelope &env);

/// Envelope value at time t (ns) measured from the window start. Zero
/// outside the window; the peak is 1.
double envelope_value(const Envelope &env, double t_ns);

/// Throws DomainError if the envelope violates its invariants.
void validate(const Envelope &env);

struct PulseSegment {
    Envelope envelope = Rectangular{};
    double peak_rabi_mhz = 0.0;    ///< omega_1 / 2pi at the envelope peak
    double phase_rad = 0.0;        ///< the phi of [theta]_phi
    double offset_mhz = 0.0;       ///< tone frequency relative to the carrier
    double amplitude_scale = 1.0;  ///< (1 + sigma) amplitude error factor

    double duration_ns() const { return envelope_duration(envelope); }
    /// 2 pi * peak_rabi * area, ignoring amplitude_scale.
    double nominal_angle() const;
    /// nominal_angle() * amplitude_scale
    double effective_angle() const;
};

/// Identically shaped tones superimposed at several offset frequencies and
/// compiled as one unit. base.offset_mhz is ignored.
struct CombPulse {
    PulseSegment base;
    std::vector<double> offsets_mhz;

    double duration_ns() const { return base.duration_ns(); }
};

struct Delay {
    double duration_ns = 0.0;
};

/// Zero-length marker that closes a sequence and defines echo acquisition.
/// The echo is integrated over +-window_half_ns around
/// marker time + center_offset_ns.
struct Acquire {
    double window_half_ns = 100.0;
    double center_offset_ns = 0.0;
};

using SequenceElement = std::variant<PulseSegment, CombPulse, Delay, Acquire>;

double element_duration(const SequenceElement &e);

/// Elements execute in list order.
struct PulseSequence {
    std::vector<SequenceElement> elements;

    PulseSequence &then(SequenceElement e) {
        elements.push_back(std::move(e));
        return *this;
    }
    PulseSequence &then(const PulseSequence &other);

    bool empty() const { return elements.empty(); }
    std::size_t size() const { return elements.size(); }
    /// Sum of nominal element durations.
    double duration_ns() const;
};

struct SampledWaveform {
    double dt_ns = kAwgGridNs;
    std::vector<std::complex<double>> samples;

    double duration_ns() const { return dt_ns * static_cast<double>(samples.size()); }
};

struct CompileOptions {
    /// The AWG grid. Other values exist for convergence diagnostics only.
    double dt_ns = kAwgGridNs;
};

/// Element durations are placed on the sample grid one after another. A
/// trailing fraction of a sample shorter than this is dropped; longer
/// fractions produce one extra sample whose rectangular amplitude is scaled by
/// the covered fraction so the pulse area is preserved.
inline constexpr double kSliverNs = 0.002;

struct GridSpan {
    std::size_t samples = 0;
    double last_fraction = 1.0;  ///< coverage of the final sample, in (0, 1]
};

GridSpan grid_span(double duration_ns, double dt_ns);

/// First sample index of every element (size() + 1 entries; the last is the
/// total sample count).
std::vector<std::size_t> element_offsets(const PulseSequence &seq, const CompileOptions &opts = {});

// --- builders --------------------------------------------------------------

/// Rectangular [theta]_phi at the given Rabi frequency. Duration is
/// theta / (2 pi rabi).
PulseSegment rect_pulse(double theta, double phi, double rabi_mhz);

/// Gaussian with the same peak and area as rect_pulse(theta, phi, rabi). The
/// untruncated profile has FWHM0 = 2 sqrt(ln2 / pi) * rect duration; the
/// window is truncation_factor * FWHM0 and the FWHM is widened slightly so
/// the truncated area still equals the rectangular area.
PulseSegment gaussian_pulse(double theta, double phi, double rabi_mhz, double truncation_factor = 3.0);

/// Gaussian with an explicitly calibrated FWHM at the given peak Rabi
/// frequency, window truncation_factor * FWHM. The rotation angle follows
/// from the truncated area.
PulseSegment gaussian_pulse_fwhm(double fwhm_ns, double phi, double rabi_mhz, double truncation_factor = 3.0);

/// s(t) = sum_k A(t) exp(i (2 pi f_k t + phi)). Offsets must be non-empty
/// and pairwise distinct.
CombPulse comb_superpose(const PulseSegment &base, std::span<const double> offsets_mhz);

/// Selects elements by index for inject_amplitude_error.
using SegmentSelector = std::function<bool(std::size_t element_index)>;

SegmentSelector all_segments();
SegmentSelector segment_indices(std::vector<std::size_t> indices);

/// Multiplies amplitude_scale of the selected pulse elements by (1 + sigma).
/// Durations are unchanged. Throws DomainError if sigma <= -1.
PulseSequence inject_amplitude_error(const PulseSequence &seq, double sigma, const SegmentSelector &selector);

/// Concatenates segment waveforms and zero-filled delays. Tone phases are
/// evaluated at absolute sample-midpoint times from sequence start, so tones
/// stay phase-coherent across segments. Throws DomainError if seq is empty.
SampledWaveform compile(const PulseSequence &seq, const CompileOptions &opts = {});

/// Largest |sample|.
double peak_amplitude(const SampledWaveform &w);

/// One line per sample: time_ns<TAB>I_MHz<TAB>Q_MHz, 6 significant digits,
/// time at the sample start measured from the sequence start.
void write_waveform(std::ostream &os, const SampledWaveform &w);
void write_waveform(const std::string &path, const SampledWaveform &w);

}  // namespace esrsim
