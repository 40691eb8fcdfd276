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

#include "esrsim/resonator.hpp"

#include <cmath>
#include <string>

#include "esrsim/diagnostics.hpp"
#include "esrsim/error.hpp"

namespace esrsim {

double ResonatorModel::q_mismatch() const {
    double implied = center_freq_ghz * 1e3 / bandwidth_mhz;
    return std::abs(q_factor - implied) / q_factor;
}

bool check_consistency(const ResonatorModel &model) {
    if (!(model.bandwidth_mhz > 0.0) || !(model.q_factor > 0.0)) {
        throw DomainError("resonator bandwidth and Q must be > 0");
    }
    double mismatch = model.q_mismatch();
    if (mismatch > 0.05) {
        warn("resonator Q " + std::to_string(model.q_factor) + " differs from center/bandwidth by " +
             std::to_string(100.0 * mismatch) + "%");
        return false;
    }
    return true;
}

std::complex<double> transfer(const ResonatorModel &model, double freq_mhz, double carrier_offset_mhz) {
    return 1.0 / std::complex<double>(1.0, 2.0 * (freq_mhz + carrier_offset_mhz) / model.bandwidth_mhz);
}

SampledWaveform apply_filter(const ResonatorModel &model, const SampledWaveform &w, double carrier_offset_mhz) {
    if (!(model.bandwidth_mhz > 0.0)) {
        throw DomainError("resonator bandwidth must be > 0");
    }
    if (!(std::abs(carrier_offset_mhz) < model.bandwidth_mhz)) {
        throw DomainError("carrier offset must lie inside the resonator bandwidth");
    }
    // y' = -p y + (pi B) x with p = pi B + 2 pi i c (rates in rad/ns);
    // zero-order-hold discretization over one sample.
    const double half_width = angular_rate(0.5 * model.bandwidth_mhz);
    const std::complex<double> pole{half_width, angular_rate(carrier_offset_mhz)};
    const std::complex<double> decay = std::exp(-pole * w.dt_ns);
    const std::complex<double> gain = half_width / pole * (1.0 - decay);

    SampledWaveform out;
    out.dt_ns = w.dt_ns;
    out.samples.resize(w.samples.size());
    std::complex<double> y{};
    for (std::size_t k = 0; k < w.samples.size(); ++k) {
        y = decay * y + gain * w.samples[k];
        out.samples[k] = y;
    }
    return out;
}

double power_to_rabi(const ResonatorModel &model, double power_w) {
    if (!std::isfinite(power_w) || power_w < 0.0) {
        throw DomainError("microwave power must be >= 0");
    }
    return model.efficiency_mhz_per_sqrt_w * std::sqrt(power_w);
}

}  // namespace esrsim
