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

#include "esrsim/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <thread>

#include "esrsim/composite.hpp"
#include "esrsim/diagnostics.hpp"
#include "esrsim/error.hpp"

namespace esrsim {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr std::size_t kChunk = 64;
constexpr double kFwhmToSigma = 0.42466090014400953;  // 1 / (2 sqrt(2 ln 2))

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Probability masses of the cells [x_i - h/2, x_i + h/2] around n equally
// spaced points on [-half_span, half_span].
template <class Cdf>
std::vector<std::pair<double, double>> cell_grid(int n, double half_span, Cdf cdf) {
    std::vector<std::pair<double, double>> out;
    if (n == 1) {
        out.emplace_back(0.0, 1.0);
        return out;
    }
    const double h = 2.0 * half_span / (n - 1);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        double x = -half_span + h * i;
        double w = cdf(x + 0.5 * h) - cdf(x - 0.5 * h);
        out.emplace_back(x, w);
        total += w;
    }
    for (auto &p : out) {
        p.second /= total;
    }
    return out;
}

void require_positive(double v, const char *what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw DomainError(std::string(what) + " must be finite and > 0");
    }
}

std::vector<std::pair<double, double>> detuning_grid(const EnsembleSpec &spec, std::mt19937_64 &rng) {
    return std::visit(
        overloaded{
            [&](const GaussianLine &g) {
                require_positive(g.fwhm_mhz, "linewidth");
                const double sd = g.fwhm_mhz * kFwhmToSigma;
                if (spec.sampling == Sampling::Random) {
                    std::normal_distribution<double> dist(0.0, sd);
                    std::vector<std::pair<double, double>> out;
                    for (int i = 0; i < spec.n_packets; ++i) {
                        out.emplace_back(dist(rng), 1.0 / spec.n_packets);
                    }
                    return out;
                }
                return cell_grid(spec.n_packets, 3.0 * g.fwhm_mhz, [sd](double x) { return normal_cdf(x / sd); });
            },
            [&](const LorentzianLine &l) {
                require_positive(l.fwhm_mhz, "linewidth");
                const double hwhm = 0.5 * l.fwhm_mhz;
                if (spec.sampling == Sampling::Random) {
                    std::cauchy_distribution<double> dist(0.0, hwhm);
                    std::vector<std::pair<double, double>> out;
                    for (int i = 0; i < spec.n_packets; ++i) {
                        out.emplace_back(dist(rng), 1.0 / spec.n_packets);
                    }
                    return out;
                }
                return cell_grid(spec.n_packets, 8.0 * l.fwhm_mhz,
                                 [hwhm](double x) { return 0.5 + std::atan(x / hwhm) / kPi; });
            },
            [](const TabulatedLine &t) {
                if (t.entries.empty()) {
                    throw DomainError("tabulated lineshape needs at least one entry");
                }
                double total = 0.0;
                for (const auto &[d, w] : t.entries) {
                    if (!std::isfinite(d) || !std::isfinite(w) || w < 0.0) {
                        throw DomainError("tabulated entries need finite detuning and weight >= 0");
                    }
                    total += w;
                }
                if (!(total > 0.0)) {
                    throw DomainError("tabulated weights sum to zero");
                }
                auto out = t.entries;
                if (std::abs(total - 1.0) > 1e-12) {
                    for (auto &p : out) {
                        p.second /= total;
                    }
                }
                return out;
            }},
        spec.lineshape);
}

std::vector<std::pair<double, double>> b1_grid(const EnsembleSpec &spec) {
    return std::visit(overloaded{[](const DeltaB1 &) { return std::vector<std::pair<double, double>>{{1.0, 1.0}}; },
                                 [](const GaussianB1 &g) {
                                     if (!(g.relative_sd >= 0.0) || !std::isfinite(g.relative_sd)) {
                                         throw DomainError("b1 relative_sd must be >= 0");
                                     }
                                     if (g.points < 1) {
                                         throw DomainError("b1 grid needs at least one point");
                                     }
                                     if (3.0 * g.relative_sd >= 1.0) {
                                         throw DomainError("b1 relative_sd must be < 1/3");
                                     }
                                     if (g.relative_sd == 0.0) {
                                         return std::vector<std::pair<double, double>>{{1.0, 1.0}};
                                     }
                                     auto grid = cell_grid(g.points, 3.0, normal_cdf);
                                     for (auto &p : grid) {
                                         p.first = 1.0 + g.relative_sd * p.first;
                                     }
                                     return grid;
                                 }},
                      spec.b1);
}

// cos(x) and sin(x) / x as polynomials in u = x^2, accurate to rounding for
// u <= 1.
inline double cos_poly(double u) {
    return 1.0 + u * (-1.0 / 2 + u * (1.0 / 24 + u * (-1.0 / 720 + u * (1.0 / 40320 +
           u * (-1.0 / 3628800 + u * (1.0 / 479001600 + u * (-1.0 / 87178291200.0 +
           u * (1.0 / 20922789888000.0 + u * (-1.0 / 6402373705728000.0)))))))));
}

inline double sinc_poly(double u) {
    return 1.0 + u * (-1.0 / 6 + u * (1.0 / 120 + u * (-1.0 / 5040 + u * (1.0 / 362880 +
           u * (-1.0 / 39916800 + u * (1.0 / 6227020800.0 + u * (-1.0 / 1307674368000.0 +
           u * (1.0 / 355687428096000.0 + u * (-1.0 / 121645100408832000.0)))))))));
}

// Truncations valid to rounding for u <= kSmallAngleU.
constexpr double kSmallAngleU = 1e-2;

inline double cos_poly_small(double u) {
    return 1.0 + u * (-1.0 / 2 + u * (1.0 / 24 + u * (-1.0 / 720 + u * (1.0 / 40320 + u * (-1.0 / 3628800)))));
}

inline double sinc_poly_small(double u) {
    return 1.0 + u * (-1.0 / 6 + u * (1.0 / 120 + u * (-1.0 / 5040 + u * (1.0 / 362880 + u * (-1.0 / 39916800)))));
}

/// Unit quaternion (a, b) for the right-handed rotation by |w| t about w.
struct Rotation {
    double a = 1.0, bx = 0.0, by = 0.0, bz = 0.0;

    Rotation() = default;
    Rotation(double wx, double wy, double wz, double t) {
        const double h = 0.5 * t;
        bx = wx * h;
        by = wy * h;
        bz = wz * h;
        const double u = bx * bx + by * by + bz * bz;
        double s;
        if (u <= 1.0) {
            a = cos_poly(u);
            s = sinc_poly(u);
        } else {
            const double r = std::sqrt(u);
            a = std::cos(r);
            s = std::sin(r) / r;
        }
        bx *= s;
        by *= s;
        bz *= s;
        // One Newton step toward unit norm; the error is already O(eps).
        const double f = 1.5 - 0.5 * (a * a + bx * bx + by * by + bz * bz);
        a *= f;
        bx *= f;
        by *= f;
        bz *= f;
    }

    void apply(double &x, double &y, double &z) const {
        const double tx = 2.0 * (by * z - bz * y);
        const double ty = 2.0 * (bz * x - bx * z);
        const double tz = 2.0 * (bx * y - by * x);
        x += a * tx + (by * tz - bz * ty);
        y += a * ty + (bz * tx - bx * tz);
        z += a * tz + (bx * ty - by * tx);
    }
};

/// Exponential damping factors for one packet over a time step.
struct Relax {
    double e1 = 1.0;
    double e2 = 1.0;

    Relax(double t1, double t2, double dt) : e1(std::exp(-dt / t1)), e2(std::exp(-dt / t2)) {}

    void apply(double &x, double &y, double &z) const {
        x *= e2;
        y *= e2;
        z = z * e1 + (1.0 - e1);
    }
};

void check_finite(const SampledWaveform &w) {
    for (const auto &s : w.samples) {
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) {
            throw DomainError("waveform contains a non-finite sample");
        }
    }
}

enum class RunKind : std::uint8_t { Zero, Constant, Varying };

struct Run {
    RunKind kind;
    bool record;
    std::size_t start;
    std::size_t len;
};

// Splits samples [begin, end) into zero, constant and varying stretches.
void append_runs(std::span<const std::complex<double>> s, std::size_t begin, std::size_t end, bool record,
                 std::vector<Run> &runs) {
    std::size_t k = begin;
    while (k < end) {
        std::size_t j = k + 1;
        while (j < end && s[j] == s[k]) {
            ++j;
        }
        RunKind kind = s[k] == std::complex<double>{} ? RunKind::Zero
                       : (j - k >= 2)                ? RunKind::Constant
                                                     : RunKind::Varying;
        if (kind == RunKind::Varying && !runs.empty() && runs.back().kind == RunKind::Varying &&
            runs.back().record == record && runs.back().start + runs.back().len == k) {
            runs.back().len += 1;
        } else {
            runs.push_back({kind, record, k, j - k});
        }
        k = j;
    }
}

struct Timeline {
    std::vector<std::complex<double>> drive;  // padded with zeros to the window end
    std::vector<Run> runs;
    std::vector<double> run_peak;  // max |drive| per run
    std::size_t first_record = 0;  // grid index of trace sample 0
    std::size_t n_record = 0;
    double dt = kAwgGridNs;
};

// Lane-parallel state of up to kChunk packets. Unused lanes carry zero
// weight and no dynamics.
struct Lanes {
    alignas(64) double x[kChunk], y[kChunk], z[kChunk];
    alignas(64) double wz[kChunk], k1[kChunk], w[kChunk];
    alignas(64) double e1h[kChunk], e2h[kChunk], inv_t1[kChunk], inv_t2[kChunk];
    alignas(64) double fr[kChunk], fi[kChunk];  // one free-precession sample
    alignas(64) double qa[kChunk], qx[kChunk], qy[kChunk], qz[kChunk];
    double k1_max = 0.0;
    double wz_max = 0.0;

    Lanes(std::span<const SpinPacket> packets, double shift, double dt) {
        for (std::size_t p = 0; p < kChunk; ++p) {
            x[p] = y[p] = 0.0;
            z[p] = 1.0;
            if (p < packets.size()) {
                const SpinPacket &pk = packets[p];
                wz[p] = angular_rate(pk.detuning_mhz + shift);
                k1[p] = angular_rate(pk.b1_scale);
                w[p] = pk.weight;
                inv_t1[p] = 1.0 / pk.t1_ns;
                inv_t2[p] = 1.0 / pk.t2_ns;
            } else {
                wz[p] = k1[p] = w[p] = inv_t1[p] = inv_t2[p] = 0.0;
            }
            e1h[p] = std::exp(-0.5 * dt * inv_t1[p]);
            e2h[p] = std::exp(-0.5 * dt * inv_t2[p]);
            const auto f = std::polar(std::exp(-dt * inv_t2[p]), wz[p] * dt);
            fr[p] = f.real();
            fi[p] = f.imag();
            k1_max = std::max(k1_max, std::abs(k1[p]));
            wz_max = std::max(wz_max, std::abs(wz[p]));
        }
    }

    void record(std::complex<double> *acc, std::size_t slot) const {
        double sr = 0.0, si = 0.0;
        for (std::size_t p = 0; p < kChunk; ++p) {
            sr += w[p] * x[p];
            si += w[p] * y[p];
        }
        acc[slot] += std::complex<double>(sr, si);
    }

    void relax_t1(double T) {
        for (std::size_t p = 0; p < kChunk; ++p) {
            z[p] = 1.0 - (1.0 - z[p]) * std::exp(-T * inv_t1[p]);
        }
    }

    void free_bulk(double T) {
        for (std::size_t p = 0; p < kChunk; ++p) {
            const auto m = std::complex<double>(x[p], y[p]) * std::polar(std::exp(-T * inv_t2[p]), wz[p] * T);
            x[p] = m.real();
            y[p] = m.imag();
        }
        relax_t1(T);
    }

    void free_step() {
        for (std::size_t p = 0; p < kChunk; ++p) {
            const double nx = x[p] * fr[p] - y[p] * fi[p];
            const double ny = x[p] * fi[p] + y[p] * fr[p];
            x[p] = nx;
            y[p] = ny;
        }
    }

    // Quaternions for one sample of constant drive d, per lane.
    template <bool Small>
    void prepare(std::complex<double> d, double dt) {
        const double h = 0.5 * dt;
        for (std::size_t p = 0; p < kChunk; ++p) {
            double bx = k1[p] * d.real() * h;
            double by = k1[p] * d.imag() * h;
            double bz = wz[p] * h;
            const double u = bx * bx + by * by + bz * bz;
            double a = Small ? cos_poly_small(u) : cos_poly(u);
            const double s = Small ? sinc_poly_small(u) : sinc_poly(u);
            bx *= s;
            by *= s;
            bz *= s;
            const double f = 1.5 - 0.5 * (a * a + bx * bx + by * by + bz * bz);
            qa[p] = a * f;
            qx[p] = bx * f;
            qy[p] = by * f;
            qz[p] = bz * f;
        }
    }

    void prepare_any(std::complex<double> d, double dt) {
        for (std::size_t p = 0; p < kChunk; ++p) {
            const Rotation r(k1[p] * d.real(), k1[p] * d.imag(), wz[p], dt);
            qa[p] = r.a;
            qx[p] = r.bx;
            qy[p] = r.by;
            qz[p] = r.bz;
        }
    }

    // Half relaxation, the prepared rotation, half relaxation.
    void step() {
        for (std::size_t p = 0; p < kChunk; ++p) {
            double X = x[p] * e2h[p];
            double Y = y[p] * e2h[p];
            double Z = z[p] * e1h[p] + (1.0 - e1h[p]);
            const double a = qa[p], bx = qx[p], by = qy[p], bz = qz[p];
            const double tx = 2.0 * (by * Z - bz * Y);
            const double ty = 2.0 * (bz * X - bx * Z);
            const double tz = 2.0 * (bx * Y - by * X);
            X += a * tx + (by * tz - bz * ty);
            Y += a * ty + (bz * tx - bx * tz);
            Z += a * tz + (bx * ty - by * tx);
            x[p] = X * e2h[p];
            y[p] = Y * e2h[p];
            z[p] = Z * e1h[p] + (1.0 - e1h[p]);
        }
    }

    void prepare_for(std::complex<double> d, double peak, double dt) {
        const double h = 0.5 * dt;
        const double bound = (k1_max * peak * h) * (k1_max * peak * h) + (wz_max * h) * (wz_max * h);
        if (bound <= kSmallAngleU) {
            prepare<true>(d, dt);
        } else if (bound <= 1.0) {
            prepare<false>(d, dt);
        } else {
            prepare_any(d, dt);
        }
    }
};

// Evolves one chunk through the timeline, adding the weighted transverse
// magnetization at each recorded grid time into acc.
void run_chunk(std::span<const SpinPacket> packets, double shift, const Timeline &tl, std::complex<double> *acc) {
    const double dt = tl.dt;
    auto lanes = std::make_unique<Lanes>(packets, shift, dt);
    Lanes &L = *lanes;
    std::size_t slot = 0;

    if (tl.first_record == 0) {
        L.record(acc, slot++);
    }
    for (std::size_t r = 0; r < tl.runs.size(); ++r) {
        const Run &run = tl.runs[r];
        const bool rec = run.record;
        switch (run.kind) {
            case RunKind::Zero: {
                const double T = dt * static_cast<double>(run.len);
                if (rec) {
                    for (std::size_t i = 0; i < run.len; ++i) {
                        L.free_step();
                        L.record(acc, slot++);
                    }
                    L.relax_t1(T);
                } else {
                    L.free_bulk(T);
                }
                break;
            }
            case RunKind::Constant: {
                L.prepare_for(tl.drive[run.start], tl.run_peak[r], dt);
                for (std::size_t i = 0; i < run.len; ++i) {
                    L.step();
                    if (rec) {
                        L.record(acc, slot++);
                    }
                }
                break;
            }
            case RunKind::Varying: {
                for (std::size_t i = 0; i < run.len; ++i) {
                    L.prepare_for(tl.drive[run.start + i], tl.run_peak[r], dt);
                    L.step();
                    if (rec) {
                        L.record(acc, slot++);
                    }
                }
                break;
            }
        }
        if (!rec && run.start + run.len == tl.first_record && tl.first_record != 0) {
            L.record(acc, slot++);
        }
    }
}

unsigned resolve_threads(unsigned requested, std::size_t chunks) {
    unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
    return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(chunks, 1)));
}

double echo_value(std::complex<double> mean, EchoMetric metric, double phase) {
    if (metric == EchoMetric::Magnitude) {
        return std::abs(mean);
    }
    return (mean * std::polar(1.0, -phase)).real();
}

}  // namespace

void SpinPacket::validate() const {
    if (!std::isfinite(detuning_mhz) || !std::isfinite(b1_scale)) {
        throw DomainError("packet detuning and b1 scale must be finite");
    }
    if (!(weight >= 0.0) || !std::isfinite(weight)) {
        throw DomainError("packet weight must be >= 0");
    }
    if (!(t1_ns > 0.0) || !(t2_ns > 0.0)) {
        throw DomainError("relaxation times must be > 0");
    }
    if (!(2.0 * t1_ns >= t2_ns)) {
        throw DomainError("relaxation times must satisfy 2 t1 >= t2");
    }
}

std::vector<SpinPacket> build_ensemble(const EnsembleSpec &spec) {
    const bool tabulated = std::holds_alternative<TabulatedLine>(spec.lineshape);
    if (!tabulated) {
        if (spec.n_packets < 1) {
            throw DomainError("ensemble needs at least one packet");
        }
        if (spec.n_packets < 11) {
            warn("only " + std::to_string(spec.n_packets) + " detuning packets; the line is coarsely resolved");
        }
    }
    std::mt19937_64 rng(spec.seed);
    const auto detunings = detuning_grid(spec, rng);
    const auto scales = b1_grid(spec);

    std::vector<SpinPacket> packets;
    packets.reserve(detunings.size() * scales.size());
    for (const auto &[d, wd] : detunings) {
        for (const auto &[b, wb] : scales) {
            SpinPacket p{d, b, wd * wb, spec.t1_ns, spec.t2_ns};
            p.validate();
            packets.push_back(p);
        }
    }
    return packets;
}

std::vector<BlochVector> evolve_packet(const SpinPacket &packet, const SampledWaveform &waveform,
                                       BlochVector initial) {
    packet.validate();
    check_finite(waveform);
    const double dt = waveform.dt_ns;
    const double wz = angular_rate(packet.detuning_mhz);
    const double k1 = angular_rate(packet.b1_scale);
    const Relax half(packet.t1_ns, packet.t2_ns, 0.5 * dt);

    std::vector<BlochVector> out;
    out.reserve(waveform.samples.size() + 1);
    out.push_back(initial);
    double x = initial.x, y = initial.y, z = initial.z;
    for (const auto &d : waveform.samples) {
        half.apply(x, y, z);
        Rotation(k1 * d.real(), k1 * d.imag(), wz, dt).apply(x, y, z);
        half.apply(x, y, z);
        out.push_back({x, y, z});
    }
    return out;
}

EchoTrace simulate_waveform(const SampledWaveform &waveform, double acquire_ns, const Acquire &acquire,
                            std::span<const SpinPacket> packets, const SimulationOptions &opts) {
    if (packets.empty()) {
        throw DomainError("ensemble is empty");
    }
    if (!(acquire.window_half_ns >= 0.0) || !std::isfinite(acquire.window_half_ns) ||
        !std::isfinite(acquire.center_offset_ns)) {
        throw DomainError("acquisition window must be finite and >= 0");
    }
    double total_weight = 0.0;
    for (const auto &p : packets) {
        p.validate();
        total_weight += p.weight;
    }
    if (!(total_weight > 0.0)) {
        throw DomainError("ensemble weights sum to zero");
    }
    check_finite(waveform);

    const double dt = waveform.dt_ns;
    const double center = acquire_ns + acquire.center_offset_ns;
    const double lo = std::max(0.0, std::ceil((center - acquire.window_half_ns) / dt - 1e-9));
    const double hi = std::floor((center + acquire.window_half_ns) / dt + 1e-9);
    if (hi < lo) {
        throw DomainError("acquisition window lies before the sequence start");
    }

    Timeline tl;
    tl.dt = dt;
    tl.first_record = static_cast<std::size_t>(lo);
    const auto last = static_cast<std::size_t>(hi);
    tl.n_record = last - tl.first_record + 1;
    tl.drive = opts.resonator ? apply_filter(*opts.resonator, waveform, opts.carrier_offset_mhz).samples
                              : waveform.samples;
    if (tl.drive.size() < last) {
        tl.drive.resize(last, std::complex<double>{});
    }
    append_runs(tl.drive, 0, tl.first_record, false, tl.runs);
    append_runs(tl.drive, tl.first_record, last, true, tl.runs);
    for (const Run &run : tl.runs) {
        double peak = 0.0;
        for (std::size_t k = run.start; k < run.start + run.len; ++k) {
            peak = std::max(peak, std::abs(tl.drive[k]));
        }
        tl.run_peak.push_back(peak);
    }

    const std::size_t n_chunks = (packets.size() + kChunk - 1) / kChunk;
    std::vector<std::vector<std::complex<double>>> partial(n_chunks);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t c = next++; c < n_chunks; c = next++) {
            auto &acc = partial[c];
            acc.assign(tl.n_record, std::complex<double>{});
            const std::size_t end = std::min(packets.size(), (c + 1) * kChunk);
            run_chunk(packets.subspan(c * kChunk, end - c * kChunk), opts.detuning_shift_mhz, tl, acc.data());
        }
    };
    const unsigned n_threads = resolve_threads(opts.threads, n_chunks);
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < n_threads; ++t) {
            pool.emplace_back(worker);
        }
    }

    EchoTrace trace;
    trace.dt_ns = dt;
    trace.start_ns = lo * dt;
    trace.center_ns = center;
    trace.metric = opts.metric;
    trace.samples.assign(tl.n_record, std::complex<double>{});
    for (const auto &acc : partial) {
        for (std::size_t j = 0; j < tl.n_record; ++j) {
            trace.samples[j] += acc[j];
        }
    }
    std::complex<double> sum{};
    for (auto &s : trace.samples) {
        s /= total_weight;
        sum += s;
    }
    trace.echo_amplitude =
        echo_value(sum / static_cast<double>(tl.n_record), opts.metric, opts.detection_phase_rad);
    return trace;
}

EchoTrace simulate_echo(const PulseSequence &seq, std::span<const SpinPacket> packets,
                        const SimulationOptions &opts) {
    std::size_t marker = seq.size();
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (std::holds_alternative<Acquire>(seq.elements[i])) {
            marker = i;
            break;
        }
    }
    if (marker == seq.size()) {
        throw DomainError("sequence has no acquisition marker");
    }
    const auto waveform = compile(seq, opts.compile);
    const auto offsets = element_offsets(seq, opts.compile);
    const double acquire_ns = static_cast<double>(offsets[marker]) * waveform.dt_ns;
    return simulate_waveform(waveform, acquire_ns, std::get<Acquire>(seq.elements[marker]), packets, opts);
}

EchoTrace simulate_echo(const PulseSequence &seq, const EnsembleSpec &spec, const SimulationOptions &opts) {
    const auto packets = build_ensemble(spec);
    return simulate_echo(seq, packets, opts);
}

std::vector<CurvePoint> nutation_curve(std::span<const double> theta_grid, std::span<const SpinPacket> packets,
                                       bool use_bb1, double rabi_mhz, double tau_ns, const SimulationOptions &opts,
                                       double window_half_ns) {
    std::vector<CurvePoint> out;
    out.reserve(theta_grid.size());
    for (double total : theta_grid) {
        const NutationSplit split = split_nutation_angle(total);
        const auto seq =
            nutation_sequence(split.theta, split.n_pad, rabi_mhz, tau_ns, use_bb1, AcquisitionWindow{window_half_ns});
        out.push_back({total, simulate_echo(seq, packets, opts).echo_amplitude});
    }
    return out;
}

double nutation_envelope(std::span<const CurvePoint> curve, double center, double half_width) {
    double best = 0.0;
    bool any = false;
    for (const auto &p : curve) {
        if (std::abs(p.x - center) <= half_width + 1e-12) {
            best = std::max(best, std::abs(p.echo));
            any = true;
        }
    }
    if (!any) {
        throw DomainError("no curve points near the requested angle");
    }
    return best;
}

std::vector<CurvePoint> field_sweep_spectrum(const PulseSequence &seq, std::span<const SpinPacket> packets,
                                             std::span<const double> sweep_offsets_mhz,
                                             const SimulationOptions &opts) {
    std::vector<CurvePoint> out;
    out.reserve(sweep_offsets_mhz.size());
    SimulationOptions local = opts;
    for (double delta : sweep_offsets_mhz) {
        if (!std::isfinite(delta)) {
            throw DomainError("sweep offsets must be finite");
        }
        local.detuning_shift_mhz = opts.detuning_shift_mhz + delta;
        out.push_back({delta, simulate_echo(seq, packets, local).echo_amplitude});
    }
    return out;
}

}  // namespace esrsim
