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

#include <span>
#include <string_view>
#include <vector>

#include "esrsim/pulse.hpp"
#include "esrsim/su2.hpp"

// Builders for BB1 composite rotations and the echo / nutation programs built
// from them.
//
// BB1([theta]_0) = [pi]_phi1 [2pi]_phi2 [pi]_phi1 [theta]_0 in time order, with
// phi1 = acos(-theta / 4pi) and phi2 = 3 phi1. All four rotations share the
// target pulse's Rabi frequency and are played back to back.

namespace esrsim {

struct Bb1Angles {
    double theta = 0.0;
    double phi1 = 0.0;
    double phi2 = 0.0;
};

/// Throws DomainError unless 0 <= theta <= 4 pi.
Bb1Angles bb1_angles(double theta);

/// Which pulses an amplitude error scales.
enum class ErrorScope {
    Global,      ///< every pulse (the amplifier output changed)
    TargetOnly,  ///< only the pi/2 target rotation of the excitation
};

ErrorScope parse_error_scope(std::string_view text);
std::string_view to_string(ErrorScope scope);

struct AcquisitionWindow {
    double half_width_ns = 100.0;
};

/// BB1 composite for a target [theta]_0. For theta == 0 the null target is
/// omitted, leaving the three correction pulses.
PulseSequence bb1(double theta, double rabi_mhz);

/// [pi/2]_0 - tau - [pi]_0 - tau - acquire
PulseSequence echo_sequence(double rabi_mhz, double tau_ns, AcquisitionWindow window = {});

/// echo_sequence with (1 + sigma) amplitude error. Global scales both pulses;
/// TargetOnly scales the pi/2.
PulseSequence plain_echo_with_error(double rabi_mhz, double tau_ns, double sigma, ErrorScope scope,
                                    AcquisitionWindow window = {});

/// BB1(pi/2) - tau - BB1(pi) - tau - acquire with amplitude error sigma.
/// Global scales all eight pulses; TargetOnly scales the final [pi/2]_0 of the
/// excitation block.
PulseSequence bb1_echo_sequence(double rabi_mhz, double tau_ns, double sigma, ErrorScope scope = ErrorScope::Global,
                                AcquisitionWindow window = {});

/// Element index of the [pi/2]_0 target inside bb1_echo_sequence.
inline constexpr std::size_t kBb1EchoTargetIndex = 3;

/// Nutation block of total angle theta + 4 pi n_pad followed by an echo
/// readout: BB1(theta) [BB1(4pi)]^n_pad - tau - BB1(pi) - tau - acquire. The
/// plain variant uses bare rotations everywhere. A zero-angle block is a null
/// pulse and is omitted.
PulseSequence nutation_sequence(double theta, int n_pad, double rabi_mhz, double tau_ns, bool use_bb1,
                                AcquisitionWindow window = {});

/// Splits a total nutation angle in [0, 5pi]-like ranges into a BB1-sized
/// head theta in [0, 4pi] and a count of 4pi paddings.
struct NutationSplit {
    double theta = 0.0;
    int n_pad = 0;
};
NutationSplit split_nutation_angle(double total_angle);

struct CombEchoParams {
    std::vector<double> offsets_mhz{0.0};
    double rabi_mhz = 1.16;           ///< peak Rabi frequency of each tone
    double excitation_fwhm_ns = 0.0;  ///< 0: equal-area calibration from rabi
    double refocus_fwhm_ns = 0.0;     ///< 0: equal-area calibration from rabi
    double truncation_factor = 3.0;
    double tau_ns = 500.0;
    AcquisitionWindow window{500.0};
};

/// Shaped echo: comb(pi/2)_0 - tau - comb(pi)_0 - tau - acquire. For selective
/// pulses the echo forms half an excitation window after the marker, which
/// the marker's center offset records.
PulseSequence comb_echo_sequence(const CombEchoParams &params);

/// Ideal propagator of a sequence for one spin at the given detuning and
/// drive scale. Rectangular single-tone segments and delays use closed forms
/// with nominal durations; shaped or offset segments are propagated sample by
/// sample on the AWG grid.
Unitary2 ideal_propagator(const PulseSequence &seq, double detuning_mhz = 0.0, double b1_scale = 1.0);

}  // namespace esrsim
