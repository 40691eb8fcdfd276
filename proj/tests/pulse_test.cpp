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

#include "esrsim/pulse.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "esrsim/error.hpp"
#include "esrsim/spectrum.hpp"

using namespace esrsim;

namespace {

double sampled_area(const SampledWaveform &w) {
    std::complex<double> sum{};
    for (const auto &s : w.samples) {
        sum += s;
    }
    return std::abs(sum) * w.dt_ns;
}

SampledWaveform compile_one(const SequenceElement &e) {
    PulseSequence s;
    s.then(e);
    return compile(s);
}

}  // namespace

TEST(pulse, rect_durations_at_nominal_rabi_frequencies) {
    EXPECT_NEAR(rect_pulse(kPi / 2, 0, 38.46).duration_ns(), 6.5, 0.05);
    EXPECT_NEAR(rect_pulse(kPi, 0, 38.46).duration_ns(), 13.0, 0.05);
    EXPECT_NEAR(rect_pulse(2 * kPi, 0, 38.46).duration_ns(), 26.0, 0.05);
    EXPECT_NEAR(rect_pulse(kPi / 2, 0, 1.16).duration_ns(), 215.5, 0.05);
    EXPECT_NEAR(rect_pulse(kPi, 0, 1.16).duration_ns(), 431.0, 0.05);
}

TEST(pulse, rect_duration_is_theta_over_rabi) {
    for (double theta : {0.3, 1.0, kPi, 7.0}) {
        for (double rabi : {0.5, 10.0, 38.46}) {
            EXPECT_DOUBLE_EQ(rect_pulse(theta, 0, rabi).duration_ns(), theta / (2 * kPi * rabi * 1e-3));
        }
    }
}

TEST(pulse, rect_builder_rejects_bad_input) {
    EXPECT_THROW(rect_pulse(-0.1, 0, 10), DomainError);
    EXPECT_THROW(rect_pulse(kPi, 0, 0.0), DomainError);
    EXPECT_THROW(rect_pulse(kPi, 0, -5.0), DomainError);
    EXPECT_THROW(rect_pulse(kPi, std::nan(""), 5.0), DomainError);
}

TEST(pulse, pi_pulse_is_130_samples) {
    EXPECT_EQ(compile_one(rect_pulse(kPi, 0, 38.46)).samples.size(), 130u);
}

TEST(pulse, grid_span_sliver_rule) {
    GridSpan a = grid_span(13.0005, 0.1);
    EXPECT_EQ(a.samples, 130u);
    EXPECT_EQ(a.last_fraction, 1.0);
    GridSpan b = grid_span(0.15, 0.1);
    EXPECT_EQ(b.samples, 2u);
    EXPECT_NEAR(b.last_fraction, 0.5, 1e-12);
    EXPECT_EQ(grid_span(1.001, 0.1).samples, 10u);
    EXPECT_EQ(grid_span(1.003, 0.1).samples, 11u);
    EXPECT_EQ(grid_span(0.0, 0.1).samples, 0u);
}

TEST(pulse, rect_partial_sample_preserves_area) {
    PulseSegment p = rect_pulse(1.0, 0, 10.0);  // 15.915... ns
    SampledWaveform w = compile_one(p);
    EXPECT_EQ(w.samples.size(), 160u);
    EXPECT_NEAR(sampled_area(w), 10.0 * p.duration_ns(), 1e-9);
}

TEST(pulse, zero_angle_rect_compiles_to_nothing) {
    PulseSequence s;
    s.then(rect_pulse(0.0, 0, 38.46));
    s.then(Delay{1.0});
    EXPECT_EQ(compile(s).samples.size(), 10u);
}

TEST(pulse, rect_phase_sets_iq_direction) {
    SampledWaveform w = compile_one(rect_pulse(kPi, kPi / 2, 20.0));
    EXPECT_NEAR(w.samples[3].real(), 0.0, 1e-12);
    EXPECT_NEAR(w.samples[3].imag(), 20.0, 1e-12);
}

TEST(pulse, gaussian_has_rect_peak_and_area) {
    for (double theta : {kPi / 2, kPi}) {
        PulseSegment g = gaussian_pulse(theta, 0, 1.16);
        SampledWaveform w = compile_one(g);
        // Quadrature over the sampled envelope recovers the rotation angle.
        const double angle = 2 * kPi * 1e-3 * sampled_area(w);
        EXPECT_NEAR(angle / theta, 1.0, 1e-3);
        EXPECT_LE(peak_amplitude(w), 1.16 + 1e-12);
        EXPECT_NEAR(peak_amplitude(w), 1.16, 1e-4);
        EXPECT_NEAR(g.effective_angle(), theta, 1e-9);
    }
}

TEST(pulse, gaussian_fwhm_close_to_equal_area_calibration) {
    PulseSegment g = gaussian_pulse(kPi, 0, 1.16);
    const auto &env = std::get<Gaussian>(g.envelope);
    const double rect = rect_pulse(kPi, 0, 1.16).duration_ns();
    const double fwhm0 = rect * 2 * std::sqrt(std::log(2.0) / kPi);
    EXPECT_NEAR(fwhm0, rect / 1.0645, 0.01 * fwhm0);
    EXPECT_NEAR(env.fwhm_ns / fwhm0, 1.0, 1e-3);
    EXPECT_NEAR(env.truncation_ns, 3 * fwhm0, 1e-9);
    EXPECT_NEAR(envelope_value(g.envelope, env.truncation_ns / 2), 1.0, 1e-15);
    EXPECT_EQ(envelope_value(g.envelope, -1.0), 0.0);
}

TEST(pulse, calibrated_fwhm_pulses_give_pi_half_and_pi) {
    // 203.0 ns and 401.7 ns Gaussians at 1.16 MHz
    EXPECT_NEAR(gaussian_pulse_fwhm(203.0, 0, 1.16).effective_angle() / (kPi / 2), 1.0, 0.01);
    EXPECT_NEAR(gaussian_pulse_fwhm(401.7, 0, 1.16).effective_angle() / kPi, 1.0, 0.01);
}

TEST(pulse, gaussian_envelope_invariants) {
    EXPECT_THROW(validate(Gaussian{10.0, 15.0}), DomainError);
    EXPECT_THROW(validate(Gaussian{0.0, 15.0}), DomainError);
    EXPECT_NO_THROW(validate(Gaussian{10.0, 20.0}));
    EXPECT_THROW(validate(Rectangular{-1.0}), DomainError);
}

TEST(pulse, single_tone_offset_phase_is_absolute_midpoint_time) {
    PulseSegment p = rect_pulse(kPi, 0.2, 38.46);
    p.offset_mhz = 7.0;
    PulseSequence s;
    s.then(Delay{1.0});
    s.then(p);
    SampledWaveform w = compile(s);
    for (std::size_t k : {10u, 50u, 120u}) {
        const double t = (k + 0.5) * 0.1;
        const auto expected = std::polar(38.46, 2 * kPi * 7.0 * 1e-3 * t + 0.2);
        EXPECT_NEAR(std::abs(w.samples[k] - expected), 0.0, 1e-12);
    }
}

TEST(pulse, comb_is_sum_of_tones) {
    PulseSegment base = gaussian_pulse(kPi, 0, 1.16);
    std::vector<double> offsets{-20, -10, 0, 10, 20};
    SampledWaveform comb = compile_one(comb_superpose(base, offsets));
    std::vector<std::complex<double>> sum(comb.samples.size());
    for (double f : offsets) {
        PulseSegment tone = base;
        tone.offset_mhz = f;
        SampledWaveform w = compile_one(tone);
        ASSERT_EQ(w.samples.size(), sum.size());
        for (std::size_t k = 0; k < sum.size(); ++k) {
            sum[k] += w.samples[k];
        }
    }
    for (std::size_t k = 0; k < sum.size(); ++k) {
        ASSERT_NEAR(std::abs(comb.samples[k] - sum[k]), 0.0, 1e-12);
    }
}

TEST(pulse, comb_peak_bounded_by_tone_count) {
    std::vector<double> offsets{-20, -10, 0, 10, 20};
    SampledWaveform w = compile_one(comb_superpose(gaussian_pulse(kPi, 0, 1.16), offsets));
    EXPECT_LE(peak_amplitude(w), 5 * 1.16);
    // All tones align at absolute time 0 only approximately on the grid, but
    // the bound is nearly reached near multiples of 100 ns.
    EXPECT_GT(peak_amplitude(w), 0.99 * 5 * 1.16);
}

TEST(pulse, comb_rejects_bad_offsets) {
    PulseSegment base = gaussian_pulse(kPi, 0, 1.16);
    std::vector<double> none;
    std::vector<double> dup{0, 10, 10};
    EXPECT_THROW(comb_superpose(base, none), DomainError);
    EXPECT_THROW(comb_superpose(base, dup), DomainError);
}

TEST(pulse, amplitude_error_scales_amplitude_not_duration) {
    PulseSequence s;
    s.then(rect_pulse(kPi / 2, 0, 38.46));
    s.then(Delay{10});
    s.then(rect_pulse(kPi, 0, 38.46));
    PulseSequence e = inject_amplitude_error(s, 0.25, segment_indices({0}));
    EXPECT_DOUBLE_EQ(e.duration_ns(), s.duration_ns());
    SampledWaveform a = compile(s), b = compile(e);
    ASSERT_EQ(a.samples.size(), b.samples.size());
    EXPECT_NEAR(b.samples[0].real(), 1.25 * a.samples[0].real(), 1e-12);
    EXPECT_EQ(b.samples.back(), a.samples.back());
    EXPECT_NEAR(std::get<PulseSegment>(e.elements[0]).effective_angle(), 1.25 * kPi / 2, 1e-12);
}

TEST(pulse, amplitude_error_domain) {
    PulseSequence s;
    s.then(rect_pulse(kPi, 0, 38.46));
    EXPECT_THROW(inject_amplitude_error(s, -1.0, all_segments()), DomainError);
    EXPECT_NO_THROW(inject_amplitude_error(s, -0.99, all_segments()));
}

TEST(pulse, empty_sequence_does_not_compile) {
    EXPECT_THROW(compile(PulseSequence{}), DomainError);
}

TEST(pulse, element_offsets_accumulate) {
    PulseSequence s;
    s.then(rect_pulse(kPi / 2, 0, 38.46));
    s.then(Delay{300});
    s.then(rect_pulse(kPi, 0, 38.46));
    s.then(Acquire{});
    auto off = element_offsets(s);
    ASSERT_EQ(off.size(), 5u);
    EXPECT_EQ(off[1], 65u);
    EXPECT_EQ(off[2], 3065u);
    EXPECT_EQ(off[3], 3195u);
    EXPECT_EQ(off[4], 3195u);
}

TEST(pulse, waveform_text_format) {
    std::ostringstream os;
    write_waveform(os, compile_one(rect_pulse(kPi, 0, 38.46)));
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, "0\t38.46\t0");
    std::getline(is, line);
    EXPECT_EQ(line, "0.1\t38.46\t0");
    std::size_t lines = 2;
    while (std::getline(is, line)) {
        ++lines;
    }
    EXPECT_EQ(lines, 130u);
}

TEST(pulse, waveform_to_unwritable_path_is_io_error) {
    EXPECT_THROW(write_waveform("/nonexistent-dir/x.txt", compile_one(rect_pulse(kPi, 0, 38.46))), IoError);
}

TEST(pulse, compile_is_deterministic) {
    std::vector<double> offsets{-20, -10, 0, 10, 20};
    PulseSequence s;
    s.then(comb_superpose(gaussian_pulse(kPi / 2, 0, 1.16), offsets));
    s.then(Delay{500});
    EXPECT_EQ(compile(s).samples, compile(s).samples);
}

TEST(pulse, reversed_conjugate_sequence_reverses_waveform) {
    const double rabi = 38.46;
    const double thetas[] = {kPi / 2, kPi, 2 * kPi, kPi};
    const double phases[] = {0.3, -1.1, 2.0, 0.7};
    PulseSequence fwd, rev;
    for (int k = 0; k < 4; ++k) {
        fwd.then(rect_pulse(thetas[k], phases[k], rabi));
        rev.then(rect_pulse(thetas[3 - k], -phases[3 - k], rabi));
    }
    auto a = compile(fwd).samples, b = compile(rev).samples;
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
        ASSERT_NEAR(std::abs(b[j] - std::conj(a[a.size() - 1 - j])), 0.0, 1e-12);
    }
}

TEST(pulse, sampled_area_matches_angle) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> th(0.2, 3 * kPi), sg(-0.3, 0.3);
    for (int i = 0; i < 40; ++i) {
        const double theta = th(rng), sigma = sg(rng);
        PulseSequence s;
        s.then(i % 2 ? rect_pulse(theta, 0.4, 38.46) : gaussian_pulse(theta, 0.4, 1.16));
        SampledWaveform w = compile(inject_amplitude_error(s, sigma, all_segments()));
        double area = 0.0;
        for (const auto &v : w.samples) {
            area += std::abs(v) * w.dt_ns;
        }
        ASSERT_NEAR(angular_rate(area) / (theta * (1 + sigma)), 1.0, 1e-3) << i;
    }
}

TEST(pulse, comb_spectrum_peaks_at_offsets) {
    const double offsets[] = {-20, -10, 0, 10, 20};
    SampledWaveform w = compile(PulseSequence{}.then(comb_superpose(gaussian_pulse(kPi / 2, 0, 1.16), offsets)));
    // One bin of the record length.
    const double bin = 1e3 / w.duration_ns();
    const auto freqs = linspace_step(-30, 30, 0.05);
    const auto mag = dtft_magnitude(w.samples, w.dt_ns, 0.0, freqs);
    const auto peaks = local_maxima(mag, 0.1);
    ASSERT_EQ(peaks.size(), 5u);
    for (int k = 0; k < 5; ++k) {
        EXPECT_NEAR(freqs[peaks[k]], offsets[k], bin) << k;
    }
}
