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

#include "core/spinor.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace dklock {

const char *error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_argument:
            return "invalid argument";
        case ErrorCode::invalid_field:
            return "invalid field";
        case ErrorCode::invalid_duration:
            return "invalid duration";
        case ErrorCode::degraded_state:
            return "degraded state";
        case ErrorCode::invalid_sequence:
            return "invalid sequence";
        case ErrorCode::no_precession:
            return "no precession";
        case ErrorCode::plan_mismatch:
            return "plan mismatch";
        case ErrorCode::infeasible:
            return "infeasible";
        case ErrorCode::fit_failure:
            return "fit failure";
        case ErrorCode::config_syntax:
            return "config syntax error";
        case ErrorCode::config_reference:
            return "config dangling reference";
        case ErrorCode::config_missing:
            return "config missing statement";
        case ErrorCode::io:
            return "i/o error";
    }
    return "unknown";
}

double wrap_phase(double phase) {
    double r = std::fmod(phase, kTwoPi);
    if (r < 0) {
        r += kTwoPi;
    }
    // fmod of a tiny negative number can round up to exactly 2pi.
    if (r >= kTwoPi) {
        r = 0.0;
    }
    return r;
}

Unitary2 Unitary2::adjoint() const {
    Unitary2 r;
    r(0, 0) = std::conj((*this)(0, 0));
    r(0, 1) = std::conj((*this)(1, 0));
    r(1, 0) = std::conj((*this)(0, 1));
    r(1, 1) = std::conj((*this)(1, 1));
    return r;
}

Unitary2 Unitary2::operator*(const Unitary2 &rhs) const {
    const Unitary2 &a = *this;
    Unitary2 r;
    for (int i = 0; i < 2; i++) {
        for (int j = 0; j < 2; j++) {
            r(i, j) = a(i, 0) * rhs(0, j) + a(i, 1) * rhs(1, j);
        }
    }
    return r;
}

double Unitary2::unitarity_error() const {
    Unitary2 p = adjoint() * *this;
    double worst = 0.0;
    for (int i = 0; i < 2; i++) {
        for (int j = 0; j < 2; j++) {
            Complex target = i == j ? Complex{1.0} : Complex{0.0};
            worst = std::max(worst, std::abs(p(i, j) - target));
        }
    }
    return worst;
}

double FrameConvention::phase_rate(const FieldParams &field) const {
    if (mode == FrameMode::lab) {
        return atomic_frequency + field.detuning;
    }
    return field.detuning;
}

void validate_field(const FieldParams &field) {
    if (!std::isfinite(field.rabi) || !std::isfinite(field.detuning)) {
        throw Error(ErrorCode::invalid_field, "field '" + field.label + "' has a non-finite frequency");
    }
    if (field.rabi <= 0) {
        throw Error(ErrorCode::invalid_field, "field '" + field.label + "' needs a positive Rabi frequency");
    }
}

double effective_rabi(const FieldParams &field) {
    validate_field(field);
    return std::hypot(field.rabi, field.detuning);
}

Unitary2 pulse_unitary(const FieldParams &field, double tau, double phi) {
    if (!(tau >= 0) || !std::isfinite(tau)) {
        throw Error(ErrorCode::invalid_duration, "pulse duration must be finite and >= 0");
    }
    double w = effective_rabi(field);
    double half_area = wrap_phase(0.5 * w * tau);
    double c = std::cos(half_area);
    double s = std::sin(half_area);
    double tilt = field.detuning / w;
    double mix = field.rabi / w;
    double diag_phase = wrap_phase(0.5 * field.detuning * tau);
    double off_phase = wrap_phase(0.5 * field.detuning * tau + wrap_phase(phi));
    const Complex i{0.0, 1.0};

    Unitary2 u;
    u(0, 0) = std::polar(1.0, diag_phase) * Complex{c, -tilt * s};
    u(0, 1) = -i * std::polar(mix * s, off_phase);
    u(1, 0) = -i * std::polar(mix * s, -off_phase);
    u(1, 1) = std::polar(1.0, -diag_phase) * Complex{c, tilt * s};
    return u;
}

Unitary2 free_unitary(const FrameConvention &frame, double t) {
    if (!(t >= 0) || !std::isfinite(t)) {
        throw Error(ErrorCode::invalid_duration, "free-evolution time must be finite and >= 0");
    }
    if (frame.mode == FrameMode::rotating) {
        return Unitary2::identity();
    }
    double half = wrap_phase(0.5 * frame.atomic_frequency * t);
    Unitary2 u;
    u(0, 0) = std::polar(1.0, half);
    u(1, 1) = std::polar(1.0, -half);
    return u;
}

SpinState apply_unitary(const Unitary2 &u, const SpinState &s) {
    return {u(0, 0) * s.g + u(0, 1) * s.e, u(1, 0) * s.g + u(1, 1) * s.e};
}

double excitation_probability(const SpinState &s) {
    double n = s.norm_squared();
    if (!(std::abs(n - 1.0) <= 1e-6)) {
        throw Error(ErrorCode::degraded_state, "state norm drifted to " + std::to_string(n));
    }
    return std::clamp(std::norm(s.e), 0.0, 1.0);
}

double closed_form_ramsey(const FieldParams &field, double tau, double interval) {
    if (!(tau >= 0) || !(interval >= 0)) {
        throw Error(ErrorCode::invalid_duration, "tau and T must be >= 0");
    }
    double w = effective_rabi(field);
    double d = field.detuning;
    double half_area = wrap_phase(0.5 * w * tau);
    double half_free = wrap_phase(0.5 * d * interval);
    double ratio = field.rabi / w;
    double s = std::sin(half_area);
    double bracket = std::cos(half_free) * std::cos(half_area) - (d / w) * std::sin(half_free) * s;
    return 4.0 * ratio * ratio * s * s * bracket * bracket;
}

}  // namespace dklock
