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

#include "esrsim/su2.hpp"

#include <algorithm>
#include <cmath>

#include "esrsim/error.hpp"

namespace esrsim {
namespace {

constexpr double kUnitarityTolerance = 1e-9;

void require_finite(double v, const char *what) {
    if (!std::isfinite(v)) {
        throw DomainError(std::string(what) + " must be finite");
    }
}

void require_unitary(const Unitary2 &u, const char *what) {
    double r = u.unitarity_residual();
    if (!(r <= kUnitarityTolerance)) {
        throw DomainError(std::string(what) + " is not unitary (residual " + std::to_string(r) + ")");
    }
}

}  // namespace

Unitary2 Unitary2::operator*(const Unitary2 &rhs) const {
    const auto &a = m_;
    const auto &b = rhs.m_;
    return {
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    };
}

Unitary2 Unitary2::adjoint() const {
    return {std::conj(m_[0]), std::conj(m_[2]), std::conj(m_[1]), std::conj(m_[3])};
}

double Unitary2::unitarity_residual() const {
    Unitary2 p = adjoint() * *this;
    double r = 0.0;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            Complex target = (i == j) ? Complex{1.0} : Complex{};
            r = std::max(r, std::abs(p(i, j) - target));
        }
    }
    return r;
}

double max_abs_diff(const Unitary2 &a, const Unitary2 &b) {
    double r = 0.0;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            r = std::max(r, std::abs(a(i, j) - b(i, j)));
        }
    }
    return r;
}

double BlochVector::norm() const { return std::sqrt(x * x + y * y + z * z); }

Unitary2 rotation_unitary(double theta, double phi) {
    require_finite(theta, "rotation angle");
    require_finite(phi, "rotation phase");
    double c = std::cos(0.5 * theta);
    double s = std::sin(0.5 * theta);
    // -i s (cos phi sx + sin phi sy) has off-diagonals -i s e^{-i phi}, -i s e^{+i phi}.
    Complex off_upper = Complex{0.0, -s} * std::polar(1.0, -phi);
    Complex off_lower = Complex{0.0, -s} * std::polar(1.0, phi);
    return {Complex{c}, off_upper, off_lower, Complex{c}};
}

Unitary2 z_rotation_unitary(double angle) {
    require_finite(angle, "rotation angle");
    return {std::polar(1.0, -0.5 * angle), Complex{}, Complex{}, std::polar(1.0, 0.5 * angle)};
}

Unitary2 field_propagator(double wx, double wy, double wz, double t) {
    require_finite(wx, "field x");
    require_finite(wy, "field y");
    require_finite(wz, "field z");
    require_finite(t, "duration");
    double w = std::sqrt(wx * wx + wy * wy + wz * wz);
    double half = 0.5 * w * t;
    if (w == 0.0) {
        return Unitary2::identity();
    }
    double c = std::cos(half);
    double s = std::sin(half) / w;
    // cos(half) I - i sin(half) (w.sigma)/|w|
    return {
        Complex{c, -s * wz},
        Complex{-s * wy, -s * wx},
        Complex{s * wy, -s * wx},
        Complex{c, s * wz},
    };
}

Unitary2 compose(std::span<const Unitary2> sequence) {
    if (sequence.empty()) {
        throw DomainError("compose requires at least one propagator");
    }
    Unitary2 acc = sequence.front();
    for (std::size_t i = 1; i < sequence.size(); ++i) {
        acc = sequence[i] * acc;
    }
    return acc;
}

double gate_fidelity(const Unitary2 &u, const Unitary2 &v) {
    require_unitary(u, "first gate");
    require_unitary(v, "second gate");
    double f = 0.5 * std::abs((u.adjoint() * v).trace());
    return std::clamp(f, 0.0, 1.0);
}

double gate_infidelity(const Unitary2 &u, const Unitary2 &v) {
    require_unitary(u, "first gate");
    require_unitary(v, "second gate");
    // W = U^dagger V = e^{i a} (cos(e/2) I - i sin(e/2) n.sigma); the traceless
    // part gives s = |sin(e/2)| without referencing the global phase, and
    // 1 - |cos(e/2)| = s^2 / (1 + sqrt(1 - s^2)).
    Unitary2 w = u.adjoint() * v;
    double s2 = 0.5 * (std::norm(w(0, 1)) + std::norm(w(1, 0))) + 0.25 * std::norm(w(0, 0) - w(1, 1));
    s2 = std::clamp(s2, 0.0, 1.0);
    return s2 / (1.0 + std::sqrt(1.0 - s2));
}

BlochVector apply_to_bloch(const Unitary2 &u, const BlochVector &m) {
    require_unitary(u, "propagator");
    // rho = (I + m.sigma) / 2
    Unitary2 rho{Complex{0.5 * (1.0 + m.z)}, Complex{0.5 * m.x, -0.5 * m.y}, Complex{0.5 * m.x, 0.5 * m.y},
                 Complex{0.5 * (1.0 - m.z)}};
    Unitary2 out = u * rho * u.adjoint();
    return {2.0 * out(1, 0).real(), 2.0 * out(1, 0).imag(), (out(0, 0) - out(1, 1)).real()};
}

}  // namespace esrsim
