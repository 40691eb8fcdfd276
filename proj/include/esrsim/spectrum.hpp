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
#include <span>
#include <vector>

#include "esrsim/ensemble.hpp"

namespace esrsim {

/// Discrete-time Fourier transform magnitude of a uniformly sampled trace,
///   S(f) = |sum_k s_k exp(-i 2 pi f (t_k - t_ref))| * dt / duration,
/// evaluated at each frequency (MHz). t_k = start + k dt.
std::vector<double> dtft_magnitude(std::span<const std::complex<double>> samples, double dt_ns, double start_ns,
                                   std::span<const double> freqs_mhz, double t_ref_ns = 0.0);

/// dtft_magnitude of an echo trace referenced to its center.
std::vector<double> trace_spectrum(const EchoTrace &trace, std::span<const double> freqs_mhz);

/// Indices of strict interior local maxima whose value is at least
/// rel_threshold times the global maximum.
std::vector<std::size_t> local_maxima(std::span<const double> values, double rel_threshold = 0.05);

/// Equally spaced grid lo, lo + step, ... up to hi (inclusive within step/1e6).
std::vector<double> linspace_step(double lo, double hi, double step);

}  // namespace esrsim
