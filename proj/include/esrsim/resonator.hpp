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

#include "esrsim/pulse.hpp"

namespace esrsim {

/// Stripline resonator seen from the baseband: a single-pole Lorentzian
/// passband plus a scalar power-to-Rabi efficiency. Defaults describe the
/// 17.06 GHz, 255 MHz, Q 66, 57.6 MHz/sqrt(W) stripline.
struct ResonatorModel {
    double center_freq_ghz = 17.06;
    double bandwidth_mhz = 255.0;  ///< FWHM of the passband
    double q_factor = 66.0;
    double efficiency_mhz_per_sqrt_w = 57.6;

    /// Relative mismatch between q_factor and center / bandwidth.
    double q_mismatch() const;
};

/// Emits a warning when q_factor deviates from center / bandwidth by more
/// than 5 %. Returns true when consistent.
bool check_consistency(const ResonatorModel &model);

/// H(f) = 1 / (1 + 2i (f + carrier_offset) / bandwidth)
std::complex<double> transfer(const ResonatorModel &model, double freq_mhz, double carrier_offset_mhz = 0.0);

/// Causal first-order recursive filter realizing transfer() on the waveform
/// grid (exact for piecewise-constant input). Output length equals input
/// length; the filter starts from rest. Throws DomainError if
/// |carrier_offset| >= bandwidth.
SampledWaveform apply_filter(const ResonatorModel &model, const SampledWaveform &w, double carrier_offset_mhz = 0.0);

/// efficiency * sqrt(power). Throws DomainError for negative power.
double power_to_rabi(const ResonatorModel &model, double power_w);

}  // namespace esrsim
