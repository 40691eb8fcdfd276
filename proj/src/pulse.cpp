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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <set>

#include "esrsim/error.hpp"

namespace esrsim {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kLn2 = std::numbers::ln2;

double gaussian_sigma(double fwhm) { return fwhm / (2.0 * std::sqrt(2.0 * kLn2)); }

double truncated_area(double fwhm, double window) {
    const double s = gaussian_sigma(fwhm);
    return s * std::sqrt(2.0 * kPi) * std::erf(0.5 * window / (std::sqrt(2.0) * s));
}

// FWHM whose truncated area over `window` equals `area`. The area grows
// monotonically with the width, so bisection between the untruncated
// solution and a generous upper bound converges.
double widen_for_area(double area, double window) {
    double lo = area / (0.5 * std::sqrt(kPi / kLn2));
    double hi = 2.0 * lo;
    for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (truncated_area(mid, window) < area ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

void require_finite(double v, const char *what) {
    if (!std::isfinite(v)) {
        throw DomainError(std::string(what) + " must be finite");
    }
}

double rect_duration(double theta, double rabi_mhz) {
    require_finite(theta, "theta");
    require_finite(rabi_mhz, "rabi");
    if (!(rabi_mhz > 0.0)) {
        throw DomainError("rabi frequency must be > 0");
    }
    if (theta < 0.0) {
        throw DomainError("rotation angle must be >= 0");
    }
    return theta / angular_rate(rabi_mhz);
}

// Fills `out` starting at global sample index `first` with one pulse element.
void render_tones(const PulseSegment &seg, std::span<const double> offsets, std::size_t first, double dt,
                  std::span<std::complex<double>> out) {
    const double amp = seg.peak_rabi_mhz * seg.amplitude_scale;
    const GridSpan span = grid_span(seg.duration_ns(), dt);
    const bool rect = std::holds_alternative<Rectangular>(seg.envelope);
    for (std::size_t j = 0; j < span.samples; ++j) {
        double shape;
        if (rect) {
            shape = (j + 1 == span.samples) ? span.last_fraction : 1.0;
        } else {
            shape = envelope_value(seg.envelope, (static_cast<double>(j) + 0.5) * dt);
        }
        if (shape == 0.0) {
            continue;
        }
        const double t_abs = (static_cast<double>(first + j) + 0.5) * dt;
        std::complex<double> sum{};
        for (double f : offsets) {
            sum += std::polar(1.0, angular_rate(f) * t_abs + seg.phase_rad);
        }
        out[j] = amp * shape * sum;
    }
}

}  // namespace

double envelope_duration(const Envelope &env) {
    return std::visit(overloaded{[](const Rectangular &r) { return r.duration_ns; },
                                 [](const Gaussian &g) { return g.truncation_ns; }},
                      env);
}

double envelope_area(const Envelope &env) {
    return std::visit(overloaded{[](const Rectangular &r) { return r.duration_ns; },
                                 [](const Gaussian &g) { return truncated_area(g.fwhm_ns, g.truncation_ns); }},
                      env);
}

double envelope_value(const Envelope &env, double t_ns) {
    return std::visit(overloaded{[t_ns](const Rectangular &r) {
                                     return (t_ns >= 0.0 && t_ns <= r.duration_ns) ? 1.0 : 0.0;
                                 },
                                 [t_ns](const Gaussian &g) {
                                     if (t_ns < 0.0 || t_ns > g.truncation_ns) {
                                         return 0.0;
                                     }
                                     double s = gaussian_sigma(g.fwhm_ns);
                                     double u = (t_ns - 0.5 * g.truncation_ns) / s;
                                     return std::exp(-0.5 * u * u);
                                 }},
                      env);
}

void validate(const Envelope &env) {
    std::visit(overloaded{[](const Rectangular &r) {
                              require_finite(r.duration_ns, "rectangular duration");
                              // Zero is a null pulse and compiles to nothing.
                              if (r.duration_ns < 0.0) {
                                  throw DomainError("rectangular duration must be >= 0");
                              }
                          },
                          [](const Gaussian &g) {
                              require_finite(g.fwhm_ns, "gaussian fwhm");
                              require_finite(g.truncation_ns, "gaussian truncation");
                              if (!(g.fwhm_ns > 0.0)) {
                                  throw DomainError("gaussian fwhm must be > 0");
                              }
                              if (g.truncation_ns < 2.0 * g.fwhm_ns) {
                                  throw DomainError("gaussian truncation must be >= 2 x fwhm");
                              }
                          }},
               env);
}

double PulseSegment::nominal_angle() const { return angular_rate(peak_rabi_mhz) * envelope_area(envelope); }

double PulseSegment::effective_angle() const { return nominal_angle() * amplitude_scale; }

double element_duration(const SequenceElement &e) {
    return std::visit(overloaded{[](const PulseSegment &s) { return s.duration_ns(); },
                                 [](const CombPulse &c) { return c.duration_ns(); },
                                 [](const Delay &d) { return d.duration_ns; },
                                 [](const Acquire &) { return 0.0; }},
                      e);
}

PulseSequence &PulseSequence::then(const PulseSequence &other) {
    elements.insert(elements.end(), other.elements.begin(), other.elements.end());
    return *this;
}

double PulseSequence::duration_ns() const {
    double t = 0.0;
    for (const auto &e : elements) {
        t += element_duration(e);
    }
    return t;
}

GridSpan grid_span(double duration_ns, double dt_ns) {
    if (!(dt_ns > 0.0) || !std::isfinite(dt_ns)) {
        throw DomainError("sample spacing must be > 0");
    }
    if (!(duration_ns > 0.0)) {
        return {0, 1.0};
    }
    double q = duration_ns / dt_ns;
    double full = std::floor(q + 1e-9);
    double rem_ns = (q - full) * dt_ns;
    auto n = static_cast<std::size_t>(full);
    if (rem_ns > kSliverNs) {
        return {n + 1, rem_ns / dt_ns};
    }
    return {n, 1.0};
}

std::vector<std::size_t> element_offsets(const PulseSequence &seq, const CompileOptions &opts) {
    std::vector<std::size_t> offsets;
    offsets.reserve(seq.size() + 1);
    std::size_t k = 0;
    for (const auto &e : seq.elements) {
        offsets.push_back(k);
        k += grid_span(element_duration(e), opts.dt_ns).samples;
    }
    offsets.push_back(k);
    return offsets;
}

PulseSegment rect_pulse(double theta, double phi, double rabi_mhz) {
    require_finite(phi, "phase");
    PulseSegment seg;
    seg.envelope = Rectangular{rect_duration(theta, rabi_mhz)};
    seg.peak_rabi_mhz = rabi_mhz;
    seg.phase_rad = phi;
    return seg;
}

PulseSegment gaussian_pulse(double theta, double phi, double rabi_mhz, double truncation_factor) {
    const double area = rect_duration(theta, rabi_mhz);
    const double fwhm0 = 2.0 * std::sqrt(kLn2 / kPi) * area;
    if (!(fwhm0 > 0.0)) {
        throw DomainError("gaussian pulse needs theta > 0");
    }
    require_finite(truncation_factor, "truncation factor");
    const double window = truncation_factor * fwhm0;
    PulseSegment seg = gaussian_pulse_fwhm(fwhm0, phi, rabi_mhz, truncation_factor);
    seg.envelope = Gaussian{widen_for_area(area, window), window};
    validate(seg.envelope);
    return seg;
}

PulseSegment gaussian_pulse_fwhm(double fwhm_ns, double phi, double rabi_mhz, double truncation_factor) {
    require_finite(phi, "phase");
    require_finite(rabi_mhz, "rabi");
    if (!(rabi_mhz > 0.0)) {
        throw DomainError("rabi frequency must be > 0");
    }
    PulseSegment seg;
    seg.envelope = Gaussian{fwhm_ns, truncation_factor * fwhm_ns};
    validate(seg.envelope);
    seg.peak_rabi_mhz = rabi_mhz;
    seg.phase_rad = phi;
    return seg;
}

CombPulse comb_superpose(const PulseSegment &base, std::span<const double> offsets_mhz) {
    if (offsets_mhz.empty()) {
        throw DomainError("comb needs at least one offset");
    }
    std::set<double> seen;
    for (double f : offsets_mhz) {
        require_finite(f, "comb offset");
        if (!seen.insert(f).second) {
            throw DomainError("comb offsets must be pairwise distinct");
        }
    }
    CombPulse comb;
    comb.base = base;
    comb.base.offset_mhz = 0.0;
    comb.offsets_mhz.assign(offsets_mhz.begin(), offsets_mhz.end());
    return comb;
}

SegmentSelector all_segments() {
    return [](std::size_t) { return true; };
}

SegmentSelector segment_indices(std::vector<std::size_t> indices) {
    return [idx = std::move(indices)](std::size_t i) { return std::find(idx.begin(), idx.end(), i) != idx.end(); };
}

PulseSequence inject_amplitude_error(const PulseSequence &seq, double sigma, const SegmentSelector &selector) {
    require_finite(sigma, "sigma");
    if (!(sigma > -1.0)) {
        throw DomainError("amplitude error sigma must be > -1");
    }
    PulseSequence out = seq;
    for (std::size_t i = 0; i < out.elements.size(); ++i) {
        if (!selector(i)) {
            continue;
        }
        std::visit(overloaded{[sigma](PulseSegment &s) { s.amplitude_scale *= (1.0 + sigma); },
                              [sigma](CombPulse &c) { c.base.amplitude_scale *= (1.0 + sigma); },
                              [](auto &) {}},
                   out.elements[i]);
    }
    return out;
}

SampledWaveform compile(const PulseSequence &seq, const CompileOptions &opts) {
    if (seq.empty()) {
        throw DomainError("cannot compile an empty sequence");
    }
    const auto offsets = element_offsets(seq, opts);
    SampledWaveform w;
    w.dt_ns = opts.dt_ns;
    w.samples.assign(offsets.back(), std::complex<double>{});
    for (std::size_t i = 0; i < seq.size(); ++i) {
        const std::size_t first = offsets[i];
        std::span<std::complex<double>> out(w.samples.data() + first, offsets[i + 1] - first);
        std::visit(overloaded{[&](const PulseSegment &s) {
                                  validate(s.envelope);
                                  double tone[1] = {s.offset_mhz};
                                  render_tones(s, tone, first, opts.dt_ns, out);
                              },
                              [&](const CombPulse &c) {
                                  validate(c.base.envelope);
                                  render_tones(c.base, c.offsets_mhz, first, opts.dt_ns, out);
                              },
                              [](const auto &) {}},
                   seq.elements[i]);
    }
    for (const auto &s : w.samples) {
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
            throw DomainError("compiled waveform contains a non-finite sample");
        }
    }
    return w;
}

double peak_amplitude(const SampledWaveform &w) {
    double p = 0.0;
    for (const auto &s : w.samples) {
        p = std::max(p, std::abs(s));
    }
    return p;
}

void write_waveform(std::ostream &os, const SampledWaveform &w) {
    char line[96];
    for (std::size_t k = 0; k < w.samples.size(); ++k) {
        double t = static_cast<double>(k) * w.dt_ns;
        std::snprintf(line, sizeof line, "%.6g\t%.6g\t%.6g\n", t, w.samples[k].real(), w.samples[k].imag());
        os << line;
    }
}

void write_waveform(const std::string &path, const SampledWaveform &w) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw IoError("cannot open " + path + " for writing");
    }
    write_waveform(f, w);
    f.flush();
    if (!f) {
        throw IoError("failed writing " + path);
    }
}

}  // namespace esrsim
