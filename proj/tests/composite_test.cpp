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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "esrsim/error.hpp"

using namespace esrsim;

namespace {

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double> &x, const std::vector<double> &y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i) {
        out.push_back(lo * std::pow(hi / lo, i / double(n - 1)));
    }
    return out;
}

}  // namespace

TEST(composite, bb1_phases_for_half_pi) {
    Bb1Angles a = bb1_angles(kPi / 2);
    // acos(-1/8) and three times it
    EXPECT_NEAR(a.phi1, std::acos(-0.125), 1e-15);
    EXPECT_NEAR(a.phi1 / kPi, 0.53989, 1e-5);
    EXPECT_NEAR(a.phi2 / kPi, 1.61968, 1e-5);
}

TEST(composite, bb1_phase_edges) {
    EXPECT_NEAR(bb1_angles(0.0).phi1, kPi / 2, 1e-15);
    EXPECT_NEAR(bb1_angles(4 * kPi).phi1, kPi, 1e-15);
    EXPECT_THROW(bb1_angles(4 * kPi + 1e-6), DomainError);
    EXPECT_THROW(bb1_angles(-0.1), DomainError);
}

TEST(composite, bb1_equals_target_without_error) {
    for (double theta : {kPi / 4, kPi / 2, kPi, 2 * kPi, 3.3, 4 * kPi}) {
        Unitary2 u = ideal_propagator(bb1(theta, 38.46));
        EXPECT_LT(gate_infidelity(u, rotation_unitary(theta, 0.0)), 1e-10) << theta;
    }
}

TEST(composite, bb1_segment_structure) {
    PulseSequence s = bb1(kPi / 2, 38.46);
    ASSERT_EQ(s.size(), 4u);
    const Bb1Angles a = bb1_angles(kPi / 2);
    const double phases[] = {a.phi1, a.phi2, a.phi1, 0.0};
    const double angles[] = {kPi, 2 * kPi, kPi, kPi / 2};
    for (int i = 0; i < 4; ++i) {
        const auto &seg = std::get<PulseSegment>(s.elements[i]);
        EXPECT_NEAR(seg.phase_rad, phases[i], 1e-15);
        EXPECT_NEAR(seg.effective_angle(), angles[i], 1e-12);
    }
    EXPECT_EQ(bb1(0.0, 38.46).size(), 3u);
}

TEST(composite, bb1_half_pi_is_585_samples) {
    EXPECT_EQ(compile(bb1(kPi / 2, 38.46)).samples.size(), 585u);
}

TEST(composite, infidelity_scaling_plain_quadratic_bb1_sixth_order) {
    std::vector<double> sigmas = log_grid(1e-3, 1e-2, 7);
    std::vector<double> plain, composite;
    for (double s : sigmas) {
        PulseSequence p;
        p.then(rect_pulse(kPi / 2, 0, 38.46));
        plain.push_back(gate_infidelity(ideal_propagator(inject_amplitude_error(p, s, all_segments())),
                                        rotation_unitary(kPi / 2, 0)));
        composite.push_back(
            gate_infidelity(ideal_propagator(inject_amplitude_error(bb1(kPi / 2, 38.46), s, all_segments())),
                            rotation_unitary(kPi / 2, 0)));
    }
    EXPECT_NEAR(loglog_slope(sigmas, plain), 2.0, 0.1);
    EXPECT_NEAR(loglog_slope(sigmas, composite), 6.0, 0.3);
}

TEST(composite, bb1_beats_plain_for_pulse_length_errors) {
    for (double s : {-0.3, -0.1, 0.05, 0.2, 0.4}) {
        PulseSequence p;
        p.then(rect_pulse(kPi, 0, 38.46));
        double plain = gate_infidelity(ideal_propagator(inject_amplitude_error(p, s, all_segments())),
                                       rotation_unitary(kPi, 0));
        double comp = gate_infidelity(ideal_propagator(inject_amplitude_error(bb1(kPi, 38.46), s, all_segments())),
                                      rotation_unitary(kPi, 0));
        EXPECT_LT(comp, plain) << s;
    }
}

TEST(composite, error_scope_parsing) {
    EXPECT_EQ(parse_error_scope("global"), ErrorScope::Global);
    EXPECT_EQ(parse_error_scope("target-only"), ErrorScope::TargetOnly);
    EXPECT_THROW(parse_error_scope("all"), ConfigError);
    EXPECT_EQ(to_string(ErrorScope::TargetOnly), "target-only");
}

TEST(composite, target_only_scales_the_excitation_target) {
    PulseSequence s = bb1_echo_sequence(38.46, 300, 0.2, ErrorScope::TargetOnly);
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (const auto *seg = std::get_if<PulseSegment>(&s.elements[i])) {
            EXPECT_EQ(seg->amplitude_scale, i == kBb1EchoTargetIndex ? 1.2 : 1.0) << i;
        }
    }
    const auto &target = std::get<PulseSegment>(s.elements[kBb1EchoTargetIndex]);
    EXPECT_NEAR(target.nominal_angle(), kPi / 2, 1e-12);
    EXPECT_EQ(target.phase_rad, 0.0);

    PulseSequence p = plain_echo_with_error(38.46, 300, 0.2, ErrorScope::TargetOnly);
    EXPECT_EQ(std::get<PulseSegment>(p.elements[0]).amplitude_scale, 1.2);
    EXPECT_EQ(std::get<PulseSegment>(p.elements[2]).amplitude_scale, 1.0);
}

TEST(composite, echo_sequence_layout) {
    PulseSequence s = echo_sequence(38.46, 300);
    ASSERT_EQ(s.size(), 5u);
    EXPECT_TRUE(std::holds_alternative<Acquire>(s.elements.back()));
    EXPECT_EQ(compile(s).samples.size(), 6195u);
    EXPECT_THROW(echo_sequence(38.46, 0.0), DomainError);
}

TEST(composite, nutation_split) {
    auto a = split_nutation_angle(5 * kPi);
    EXPECT_NEAR(a.theta, kPi, 1e-12);
    EXPECT_EQ(a.n_pad, 1);
    auto b = split_nutation_angle(4 * kPi);
    EXPECT_NEAR(b.theta, 4 * kPi, 1e-12);
    EXPECT_EQ(b.n_pad, 0);
    auto c = split_nutation_angle(0.0);
    EXPECT_EQ(c.theta, 0.0);
    EXPECT_EQ(c.n_pad, 0);
    auto d = split_nutation_angle(4.5 * kPi);
    EXPECT_NEAR(d.theta, 0.5 * kPi, 1e-12);
    EXPECT_EQ(d.n_pad, 1);
    EXPECT_THROW(split_nutation_angle(-1.0), DomainError);
}

TEST(composite, null_head_equals_padding_boundary) {
    for (bool use_bb1 : {false, true}) {
        auto a = compile(nutation_sequence(4 * kPi, 0, 38.46, 300, use_bb1));
        auto b = compile(nutation_sequence(0.0, 1, 38.46, 300, use_bb1));
        EXPECT_EQ(a.samples, b.samples) << use_bb1;
    }
}

TEST(composite, nutation_total_rotation) {
    // Without the readout, the nutation block rotates by the total angle.
    for (double total : {0.7, 3 * kPi, 4.6 * kPi}) {
        auto split = split_nutation_angle(total);
        for (bool use_bb1 : {false, true}) {
            PulseSequence s = nutation_sequence(split.theta, split.n_pad, 38.46, 300, use_bb1);
            PulseSequence block;
            for (const auto &e : s.elements) {
                if (std::holds_alternative<Delay>(e)) {
                    break;
                }
                block.then(e);
            }
            EXPECT_LT(gate_infidelity(ideal_propagator(block), rotation_unitary(total, 0)), 1e-10);
        }
    }
}

TEST(composite, comb_echo_marks_echo_after_half_excitation) {
    CombEchoParams p;
    p.offsets_mhz = {-20, -10, 0, 10, 20};
    p.excitation_fwhm_ns = 203.0;
    p.refocus_fwhm_ns = 401.7;
    PulseSequence s = comb_echo_sequence(p);
    const auto &acq = std::get<Acquire>(s.elements.back());
    EXPECT_NEAR(acq.center_offset_ns, 0.5 * 3 * 203.0, 1e-9);
    EXPECT_EQ(acq.window_half_ns, 500.0);
}

TEST(composite, sampled_shaped_propagator_matches_effective_angle) {
    // All samples of an on-resonance Gaussian share the x axis, so the
    // product is a single rotation by the sampled area.
    PulseSequence s;
    s.then(gaussian_pulse(kPi, 0.0, 1.16));
    SampledWaveform w = compile(s);
    double area = 0;
    for (const auto &v : w.samples) {
        area += v.real() * w.dt_ns;
    }
    EXPECT_LT(max_abs_diff(ideal_propagator(s), rotation_unitary(2 * kPi * 1e-3 * area, 0.0)), 1e-12);
}

TEST(composite, free_precession_propagator) {
    PulseSequence s;
    s.then(Delay{25.0});
    // 10 MHz for 25 ns is a quarter turn about z.
    EXPECT_LT(gate_infidelity(ideal_propagator(s, 10.0), z_rotation_unitary(kPi / 2)), 1e-15);
}

TEST(composite, bb1_phase_round_trip) {
    for (int k = 0; k <= 400; ++k) {
        const double theta = 4 * kPi * k / 400.0;
        const Bb1Angles a = bb1_angles(theta);
        ASSERT_NEAR(std::cos(a.phi1) * 4 * kPi, -theta, 1e-12);
        ASSERT_NEAR(a.phi2, 3 * a.phi1, 1e-15);
    }
    EXPECT_LT(gate_infidelity(ideal_propagator(bb1(7 * kPi / 3, 38.46)), rotation_unitary(7 * kPi / 3, 0.0)), 1e-10);
}

TEST(composite, bb1_leaves_detuning_error_at_leading_order) {
    // BB1 cancels amplitude errors only: off resonance its infidelity keeps
    // the same Delta^2 order as the bare pulse and stays comparable in size.
    const double rabi = 38.46;
    for (double theta : {kPi / 4, kPi / 2, kPi}) {
        PulseSequence plain;
        plain.then(rect_pulse(theta, 0.0, rabi));
        auto plain_at = [&](double d) {
            return gate_infidelity(ideal_propagator(plain, d), rotation_unitary(theta, 0.0));
        };
        auto bb1_at = [&](double d) {
            return gate_infidelity(ideal_propagator(bb1(theta, rabi), d), rotation_unitary(theta, 0.0));
        };
        std::vector<double> d = log_grid(1e-3 * rabi, 1e-2 * rabi, 7), p, b;
        for (double x : d) {
            p.push_back(plain_at(x));
            b.push_back(bb1_at(x));
        }
        EXPECT_NEAR(loglog_slope(d, p), 2.0, 0.05) << theta;
        EXPECT_NEAR(loglog_slope(d, b), 2.0, 0.05) << theta;
        for (int k = 1; k <= 25; ++k) {
            const double x = 0.01 * k * rabi;
            EXPECT_GT(bb1_at(x), 0.6 * plain_at(x)) << theta << " " << x;
        }
    }
}
