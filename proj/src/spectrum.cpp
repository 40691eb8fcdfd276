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

#include "esrsim/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include "esrsim/error.hpp"

namespace esrsim {

std::vector<double> dtft_magnitude(std::span<const std::complex<double>> samples, double dt_ns, double start_ns,
                                   std::span<const double> freqs_mhz, double t_ref_ns) {
    if (samples.empty()) {
        throw DomainError("cannot transform an empty trace");
    }
    const double norm = 1.0 / static_cast<double>(samples.size());
    std::vector<double> out;
    out.reserve(freqs_mhz.size());
    for (double f : freqs_mhz) {
        // Rotate by a fixed per-sample phasor; refresh it periodically to
        // bound drift.
        const double w = -angular_rate(f);
        const std::complex<double> step = std::polar(1.0, w * dt_ns);
        std::complex<double> sum{};
        std::complex<double> ph;
        for (std::size_t k = 0; k < samples.size(); ++k) {
            if (k % 256 == 0) {
                ph = std::polar(1.0, w * (start_ns + static_cast<double>(k) * dt_ns - t_ref_ns));
            }
            sum += samples[k] * ph;
            ph *= step;
        }
        out.push_back(std::abs(sum) * norm);
    }
    return out;
}

std::vector<double> trace_spectrum(const EchoTrace &trace, std::span<const double> freqs_mhz) {
    return dtft_magnitude(trace.samples, trace.dt_ns, trace.start_ns, freqs_mhz, trace.center_ns);
}

std::vector<std::size_t> local_maxima(std::span<const double> values, double rel_threshold) {
    std::vector<std::size_t> out;
    if (values.size() < 3) {
        return out;
    }
    const double top = *std::max_element(values.begin(), values.end());
    for (std::size_t i = 1; i + 1 < values.size(); ++i) {
        if (values[i] > values[i - 1] && values[i] >= values[i + 1] && values[i] >= rel_threshold * top) {
            out.push_back(i);
        }
    }
    return out;
}

std::vector<double> linspace_step(double lo, double hi, double step) {
    if (!(step > 0.0) || !std::isfinite(lo) || !std::isfinite(hi) || hi < lo) {
        throw DomainError("grid needs lo <= hi and step > 0");
    }
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-6)) + 1;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = lo + step * static_cast<double>(i);
    }
    return out;
}

}  // namespace esrsim
