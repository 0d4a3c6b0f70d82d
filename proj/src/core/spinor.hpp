// Copyright 2026 The dklock Authors
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

#ifndef DKLOCK_CORE_SPINOR_HPP
#define DKLOCK_CORE_SPINOR_HPP

#include <array>
#include <complex>
#include <numbers>
#include <string>

namespace dklock {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reduces an angle to [0, 2pi).
double wrap_phase(double phase);

/// Amplitudes on the {|g>, |e>} basis.
struct SpinState {
    Complex g{1.0, 0.0};
    Complex e{0.0, 0.0};

    static SpinState ground() { return {}; }
    static SpinState excited() { return {Complex{0.0, 0.0}, Complex{1.0, 0.0}}; }

    double norm_squared() const { return std::norm(g) + std::norm(e); }

    bool operator==(const SpinState &) const = default;
};

/// One driving field. Both frequencies are angular (rad/s).
struct FieldParams {
    double rabi = 0.0;
    double detuning = 0.0;
    std::string label;

    /// Builds a field from frequencies in Hz, the unit experiments tabulate.
    static FieldParams from_hz(std::string label, double rabi_hz, double detuning_hz) {
        return {kTwoPi * rabi_hz, kTwoPi * detuning_hz, std::move(label)};
    }

    bool operator==(const FieldParams &) const = default;
};

/// Row-major complex 2x2 matrix.
struct Unitary2 {
    std::array<Complex, 4> m{Complex{1.0}, Complex{0.0}, Complex{0.0}, Complex{1.0}};

    static Unitary2 identity() { return {}; }

    const Complex &operator()(int row, int col) const { return m[2 * row + col]; }
    Complex &operator()(int row, int col) { return m[2 * row + col]; }

    Unitary2 adjoint() const;
    Unitary2 operator*(const Unitary2 &rhs) const;

    /// max |(U^dagger U - I)_ij|.
    double unitarity_error() const;
};

enum class FrameMode { rotating, lab };

/// In rotating mode the atomic precession is factored out: omega_a = 0 and
/// each field's phase advances at its detuning. Lab mode keeps omega_a and
/// advances field phases at omega_a + delta_j.
struct FrameConvention {
    FrameMode mode = FrameMode::rotating;
    double atomic_frequency = 0.0;

    static FrameConvention rotating() { return {}; }
    static FrameConvention lab(double omega_a) { return {FrameMode::lab, omega_a}; }

    /// Rate at which the phase of `field` advances on the timeline.
    double phase_rate(const FieldParams &field) const;

    bool operator==(const FrameConvention &) const = default;
};

/// Throws ErrorCode::invalid_field unless rabi > 0 and both values are finite.
void validate_field(const FieldParams &field);

double effective_rabi(const FieldParams &field);

/// Interaction matrix of a rectangular pulse of duration `tau` with phase `phi`:
///
///   [ e^{i d tau/2}(c - i d/W s)           -i e^{ i(d tau/2 + phi)} O/W s ]
///   [ -i e^{-i(d tau/2 + phi)} O/W s       e^{-i d tau/2}(c + i d/W s)    ]
///
/// with O the Rabi frequency, d the detuning, W = sqrt(O^2 + d^2),
/// c = cos(W tau/2) and s = sin(W tau/2).
Unitary2 pulse_unitary(const FieldParams &field, double tau, double phi);

/// Free evolution diag(e^{i omega_a t/2}, e^{-i omega_a t/2}); identity in the
/// rotating frame.
Unitary2 free_unitary(const FrameConvention &frame, double t);

/// Plain matrix-vector product. The result is never renormalized.
SpinState apply_unitary(const Unitary2 &u, const SpinState &s);

/// |c_e|^2. Throws ErrorCode::degraded_state when the norm is off by > 1e-6.
double excitation_probability(const SpinState &s);

/// Short-pulse closed form of the two-pulse Ramsey signal from |g>:
///
///   4 (O/W)^2 sin^2(W tau/2) [cos(d T/2) cos(W tau/2) - (d/W) sin(d T/2) sin(W tau/2)]^2
double closed_form_ramsey(const FieldParams &field, double tau, double interval);

}  // namespace dklock

#endif
