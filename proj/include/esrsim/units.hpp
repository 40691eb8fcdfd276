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

#include <numbers>

// Unit conventions used throughout the library:
//   time       ns
//   frequency  MHz (cyclic; Rabi frequencies are omega_1 / 2pi)
//   angle      rad
// A frequency f in MHz acting for t ns accumulates 2*pi*f*t*1e-3 rad.

namespace esrsim {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// AWG sample spacing.
inline constexpr double kAwgGridNs = 0.1;

/// rad per (MHz * ns).
inline constexpr double kRadPerMhzNs = kTwoPi * 1e-3;

/// Angular frequency in rad/ns for a cyclic frequency in MHz.
constexpr double angular_rate(double freq_mhz) { return kRadPerMhzNs * freq_mhz; }

}  // namespace esrsim
