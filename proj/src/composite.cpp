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

#include "esrsim/composite.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "esrsim/error.hpp"

namespace esrsim {
namespace {

constexpr double kFourPi = 4.0 * kPi;
// Slack for angles computed as sums of pi multiples.
constexpr double kAngleSlack = 1e-12;

void require_positive(double v, const char *what) {
    if (!std::isfinite(v) || !(v > 0.0)) {
        throw DomainError(std::string(what) + " must be finite and > 0");
    }
}

PulseSequence bare_rotation(double theta, double rabi_mhz) {
    PulseSequence s;
    if (theta > 0.0) {
        s.then(rect_pulse(theta, 0.0, rabi_mhz));
    }
    return s;
}

bool is_closed_form(const PulseSegment &s) {
    return std::holds_alternative<Rectangular>(s.envelope) && s.offset_mhz == 0.0;
}

}  // namespace

Bb1Angles bb1_angles(double theta) {
    if (!std::isfinite(theta) || theta < 0.0 || theta > kFourPi + kAngleSlack) {
        throw DomainError("BB1 target angle must lie in [0, 4pi]; use padding for larger rotations");
    }
    double phi1 = std::acos(std::max(-1.0, -theta / kFourPi));
    return {theta, phi1, 3.0 * phi1};
}

ErrorScope parse_error_scope(std::string_view text) {
    if (text == "global") {
        return ErrorScope::Global;
    }
    if (text == "target-only") {
        return ErrorScope::TargetOnly;
    }
    throw ConfigError("unknown error scope '" + std::string(text) + "' (expected global|target-only)");
}

std::string_view to_string(ErrorScope scope) { return scope == ErrorScope::Global ? "global" : "target-only"; }

PulseSequence bb1(double theta, double rabi_mhz) {
    const Bb1Angles a = bb1_angles(theta);
    require_positive(rabi_mhz, "rabi frequency");
    PulseSequence s;
    s.then(rect_pulse(kPi, a.phi1, rabi_mhz));
    s.then(rect_pulse(2.0 * kPi, a.phi2, rabi_mhz));
    s.then(rect_pulse(kPi, a.phi1, rabi_mhz));
    if (theta > 0.0) {
        s.then(rect_pulse(std::min(theta, kFourPi), 0.0, rabi_mhz));
    }
    return s;
}

PulseSequence echo_sequence(double rabi_mhz, double tau_ns, AcquisitionWindow window) {
    require_positive(tau_ns, "tau");
    PulseSequence s;
    s.then(rect_pulse(kPi / 2.0, 0.0, rabi_mhz));
    s.then(Delay{tau_ns});
    s.then(rect_pulse(kPi, 0.0, rabi_mhz));
    s.then(Delay{tau_ns});
    s.then(Acquire{window.half_width_ns, 0.0});
    return s;
}

PulseSequence plain_echo_with_error(double rabi_mhz, double tau_ns, double sigma, ErrorScope scope,
                                    AcquisitionWindow window) {
    auto seq = echo_sequence(rabi_mhz, tau_ns, window);
    auto selector = scope == ErrorScope::Global ? all_segments() : segment_indices({0});
    return inject_amplitude_error(seq, sigma, selector);
}

PulseSequence bb1_echo_sequence(double rabi_mhz, double tau_ns, double sigma, ErrorScope scope,
                                AcquisitionWindow window) {
    require_positive(tau_ns, "tau");
    PulseSequence s = bb1(kPi / 2.0, rabi_mhz);
    s.then(Delay{tau_ns});
    s.then(bb1(kPi, rabi_mhz));
    s.then(Delay{tau_ns});
    s.then(Acquire{window.half_width_ns, 0.0});
    auto selector = scope == ErrorScope::Global ? all_segments() : segment_indices({kBb1EchoTargetIndex});
    return inject_amplitude_error(s, sigma, selector);
}

NutationSplit split_nutation_angle(double total_angle) {
    if (!std::isfinite(total_angle) || total_angle < 0.0) {
        throw DomainError("nutation angle must be finite and >= 0");
    }
    if (total_angle <= kFourPi + kAngleSlack) {
        return {std::min(total_angle, kFourPi), 0};
    }
    int n = static_cast<int>(std::ceil(total_angle / kFourPi - kAngleSlack)) - 1;
    return {total_angle - kFourPi * n, n};
}

PulseSequence nutation_sequence(double theta, int n_pad, double rabi_mhz, double tau_ns, bool use_bb1,
                                AcquisitionWindow window) {
    bb1_angles(theta);
    require_positive(rabi_mhz, "rabi frequency");
    require_positive(tau_ns, "tau");
    if (n_pad < 0) {
        throw DomainError("padding count must be >= 0");
    }
    PulseSequence s;
    if (theta > 0.0) {
        s.then(use_bb1 ? bb1(theta, rabi_mhz) : bare_rotation(theta, rabi_mhz));
    }
    for (int i = 0; i < n_pad; ++i) {
        s.then(use_bb1 ? bb1(kFourPi, rabi_mhz) : bare_rotation(kFourPi, rabi_mhz));
    }
    s.then(Delay{tau_ns});
    s.then(use_bb1 ? bb1(kPi, rabi_mhz) : bare_rotation(kPi, rabi_mhz));
    s.then(Delay{tau_ns});
    s.then(Acquire{window.half_width_ns, 0.0});
    return s;
}

PulseSequence comb_echo_sequence(const CombEchoParams &p) {
    require_positive(p.tau_ns, "tau");
    auto shaped = [&](double theta, double fwhm) {
        return fwhm > 0.0 ? gaussian_pulse_fwhm(fwhm, 0.0, p.rabi_mhz, p.truncation_factor)
                          : gaussian_pulse(theta, 0.0, p.rabi_mhz, p.truncation_factor);
    };
    CombPulse excite = comb_superpose(shaped(kPi / 2.0, p.excitation_fwhm_ns), p.offsets_mhz);
    CombPulse refocus = comb_superpose(shaped(kPi, p.refocus_fwhm_ns), p.offsets_mhz);
    PulseSequence s;
    s.then(excite);
    s.then(Delay{p.tau_ns});
    s.then(refocus);
    s.then(Delay{p.tau_ns});
    s.then(Acquire{p.window.half_width_ns, 0.5 * excite.duration_ns()});
    return s;
}

Unitary2 ideal_propagator(const PulseSequence &seq, double detuning_mhz, double b1_scale) {
    if (!std::isfinite(detuning_mhz) || !std::isfinite(b1_scale)) {
        throw DomainError("detuning and drive scale must be finite");
    }
    const double wz = angular_rate(detuning_mhz);
    std::optional<SampledWaveform> sampled;
    std::vector<std::size_t> offsets;

    Unitary2 acc;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        const auto &e = seq.elements[i];
        if (const auto *d = std::get_if<Delay>(&e)) {
            acc = field_propagator(0.0, 0.0, wz, d->duration_ns) * acc;
            continue;
        }
        if (std::holds_alternative<Acquire>(e)) {
            continue;
        }
        const auto *seg = std::get_if<PulseSegment>(&e);
        if (seg != nullptr && is_closed_form(*seg)) {
            double amp = angular_rate(seg->peak_rabi_mhz * seg->amplitude_scale * b1_scale);
            acc = field_propagator(amp * std::cos(seg->phase_rad), amp * std::sin(seg->phase_rad), wz,
                                   seg->duration_ns()) *
                  acc;
            continue;
        }
        if (!sampled) {
            sampled = compile(seq);
            offsets = element_offsets(seq);
        }
        const double dt = sampled->dt_ns;
        for (std::size_t k = offsets[i]; k < offsets[i + 1]; ++k) {
            const auto v = sampled->samples[k] * b1_scale;
            acc = field_propagator(angular_rate(v.real()), angular_rate(v.imag()), wz, dt) * acc;
        }
    }
    return acc;
}

}  // namespace esrsim
