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

#include <array>
#include <complex>
#include <span>

// Single spin-1/2 propagator algebra.
//
// Sign convention (fixed for the whole library): a rotation by theta about the
// unit axis n is exp(-i * theta * n.sigma / 2). On the Bloch sphere this is a
// right-handed rotation, so a positive rotation about +x takes +z to -y, and a
// positive rotation about +y takes +z to +x. It matches the rotating-frame
// Bloch equation dm/dt = Omega x m used by the ensemble integrator.
//
// Global phase is kept in storage. Only gate_fidelity / gate_infidelity and
// the Bloch projection are insensitive to it.

namespace esrsim {

using Complex = std::complex<double>;

/// 2x2 complex matrix holding a single-spin propagator. Entries are stored
/// row-major. The constructor does not validate unitarity; operations that
/// require it check unitarity_residual().
class Unitary2 {
   public:
    Unitary2() : m_{Complex{1.0}, Complex{}, Complex{}, Complex{1.0}} {}
    Unitary2(Complex u00, Complex u01, Complex u10, Complex u11) : m_{u00, u01, u10, u11} {}

    static Unitary2 identity() { return {}; }

    const Complex &operator()(int row, int col) const { return m_[2 * row + col]; }

    Unitary2 operator*(const Unitary2 &rhs) const;
    Unitary2 adjoint() const;
    Complex trace() const { return m_[0] + m_[3]; }
    Complex determinant() const { return m_[0] * m_[3] - m_[1] * m_[2]; }

    /// max_ij |(U^dagger U - I)_ij|
    double unitarity_residual() const;

   private:
    std::array<Complex, 4> m_;
};

/// Max entrywise distance between two matrices.
double max_abs_diff(const Unitary2 &a, const Unitary2 &b);

/// Net magnetization direction. |m| <= 1; relaxation can shrink it.
struct BlochVector {
    double x = 0.0;
    double y = 0.0;
    double z = 1.0;

    double norm() const;
};

/// [theta]_phi: rotation by theta about (cos phi, sin phi, 0).
Unitary2 rotation_unitary(double theta, double phi);

/// Rotation by angle about +z.
Unitary2 z_rotation_unitary(double angle);

/// exp(-i * t * (wx sx + wy sy + wz sz) / 2), i.e. free evolution for t under
/// a static rotating-frame field with angular components w (rad per unit t).
Unitary2 field_propagator(double wx, double wy, double wz, double t);

/// Time-ordered product. sequence[0] acts first, so the result is
/// sequence[n-1] * ... * sequence[0]. Throws DomainError when empty.
Unitary2 compose(std::span<const Unitary2> sequence);

/// |Tr(U^dagger V)| / 2. Throws DomainError if either input has a unitarity
/// residual above 1e-9.
double gate_fidelity(const Unitary2 &u, const Unitary2 &v);

/// 1 - gate_fidelity(u, v), evaluated without cancellation so that values
/// far below machine epsilon stay meaningful.
double gate_infidelity(const Unitary2 &u, const Unitary2 &v);

/// Conjugates (I + m.sigma)/2 by u and re-extracts the Bloch vector.
BlochVector apply_to_bloch(const Unitary2 &u, const BlochVector &m);

}  // namespace esrsim
