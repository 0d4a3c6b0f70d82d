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

#include "core/sequence.hpp"

#include <cmath>

#include "core/error.hpp"

namespace dklock {

Sequence &Sequence::pulse(const FieldParams &field, double tau, double phase_offset) {
    events.emplace_back(PulseSpec{field, tau, phase_offset});
    return *this;
}

Sequence &Sequence::wait(double duration) {
    events.emplace_back(Wait{duration, false});
    return *this;
}

Sequence &Sequence::scan_wait(double duration) {
    events.emplace_back(Wait{duration, true});
    return *this;
}

double Sequence::duration() const {
    double total = 0.0;
    for (const auto &ev : events) {
        if (const auto *w = std::get_if<Wait>(&ev)) {
            total += w->duration;
        } else if (clock_during_pulses) {
            total += std::get<PulseSpec>(ev).tau;
        }
    }
    return total;
}

void Sequence::validate() const {
    if (events.empty()) {
        throw Error(ErrorCode::invalid_sequence, "sequence is empty");
    }
    if (!std::isfinite(start_time) || start_time < 0) {
        throw Error(ErrorCode::invalid_duration, "sequence start time must be finite and >= 0");
    }
    if (frame.mode == FrameMode::lab && !std::isfinite(frame.atomic_frequency)) {
        throw Error(ErrorCode::invalid_argument, "lab frame needs a finite atomic frequency");
    }
    size_t pulses = 0;
    for (const auto &ev : events) {
        if (const auto *w = std::get_if<Wait>(&ev)) {
            if (!std::isfinite(w->duration) || w->duration < 0) {
                throw Error(ErrorCode::invalid_duration, "wait durations must be finite and >= 0");
            }
            continue;
        }
        const auto &p = std::get<PulseSpec>(ev);
        validate_field(p.field);
        if (!std::isfinite(p.tau) || p.tau <= 0) {
            throw Error(ErrorCode::invalid_duration, "pulse on field '" + p.field.label + "' needs tau > 0");
        }
        if (!std::isfinite(p.field.rabi * p.tau) || !std::isfinite(p.phase_offset)) {
            throw Error(ErrorCode::invalid_field, "pulse on field '" + p.field.label + "' has a non-finite area or phase");
        }
        pulses++;
    }
    if (pulses == 0) {
        throw Error(ErrorCode::invalid_sequence, "sequence needs at least one pulse");
    }
}

std::vector<TimedPulse> compile_timeline(const Sequence &seq) {
    seq.validate();
    std::vector<TimedPulse> out;
    double t = seq.start_time;
    for (const auto &ev : seq.events) {
        if (const auto *w = std::get_if<Wait>(&ev)) {
            t += w->duration;
            continue;
        }
        const auto &p = std::get<PulseSpec>(ev);
        out.push_back({p, t, seq.frame.phase_rate(p.field) * t + p.phase_offset});
        if (seq.clock_during_pulses) {
            t += p.tau;
        }
    }
    return out;
}

SpinState evolve(const Sequence &seq, const SpinState &initial) {
    seq.validate();
    if (!(std::abs(initial.norm_squared() - 1.0) <= 1e-6)) {
        throw Error(ErrorCode::degraded_state, "initial state is not normalized");
    }
    SpinState state = initial;
    double t = seq.start_time;
    for (const auto &ev : seq.events) {
        if (const auto *w = std::get_if<Wait>(&ev)) {
            state = apply_unitary(free_unitary(seq.frame, w->duration), state);
            t += w->duration;
            continue;
        }
        const auto &p = std::get<PulseSpec>(ev);
        double phase = seq.frame.phase_rate(p.field) * t + p.phase_offset;
        state = apply_unitary(pulse_unitary(p.field, p.tau, phase), state);
        if (seq.clock_during_pulses) {
            // The atomic frame keeps precessing while the pulse is on.
            state = apply_unitary(free_unitary(seq.frame, p.tau), state);
            t += p.tau;
        }
    }
    if (!(std::abs(state.norm_squared() - 1.0) <= 1e-6)) {
        throw Error(ErrorCode::degraded_state, "state norm drifted during evolution");
    }
    return state;
}

std::vector<double> FringeScan::times() const {
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto &pt : points) {
        out.push_back(pt.T);
    }
    return out;
}

std::vector<double> FringeScan::probabilities() const {
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto &pt : points) {
        out.push_back(pt.p);
    }
    return out;
}

void FringeScan::validate() const {
    for (size_t i = 0; i < points.size(); i++) {
        const auto &pt = points[i];
        if (i > 0 && !(pt.T > points[i - 1].T)) {
            throw Error(ErrorCode::invalid_argument, "scan T values must be strictly increasing");
        }
        if (!(pt.p >= 0 && pt.p <= 1)) {
            throw Error(ErrorCode::invalid_argument, "scan probabilities must lie in [0,1]");
        }
        if (!(pt.sd >= 0)) {
            throw Error(ErrorCode::invalid_argument, "scan standard deviations must be >= 0");
        }
    }
}

FringeScan scan(const Sequence &tmpl, std::span<const double> grid) {
    tmpl.validate();
    size_t marked = 0;
    size_t scan_index = 0;
    for (size_t i = 0; i < tmpl.events.size(); i++) {
        const auto *w = std::get_if<Wait>(&tmpl.events[i]);
        if (w != nullptr && w->scan_variable) {
            marked++;
            scan_index = i;
        }
    }
    if (marked != 1) {
        throw Error(ErrorCode::invalid_sequence,
                    "scan template needs exactly one scan-variable wait, found " + std::to_string(marked));
    }
    if (grid.empty()) {
        throw Error(ErrorCode::invalid_argument, "scan grid is empty");
    }
    for (size_t i = 0; i < grid.size(); i++) {
        if (!std::isfinite(grid[i]) || grid[i] < 0) {
            throw Error(ErrorCode::invalid_duration, "scan grid values must be finite and >= 0");
        }
        if (i > 0 && !(grid[i] > grid[i - 1])) {
            throw Error(ErrorCode::invalid_argument, "scan grid must be strictly increasing");
        }
    }

    FringeScan out;
    out.description = tmpl.description;
    out.clock_during_pulses = tmpl.clock_during_pulses;
    out.points.resize(grid.size());
    parallel_for(grid.size(), [&](size_t k) {
        Sequence seq = tmpl;
        std::get<Wait>(seq.events[scan_index]).duration = grid[k];
        SpinState s = evolve(seq, SpinState::ground());
        out.points[k] = {grid[k], excitation_probability(s), 0.0};
    });
    return out;
}

std::vector<double> make_grid(double start, double stop, double step) {
    if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step) || step <= 0 || stop < start) {
        throw Error(ErrorCode::invalid_argument, "grid needs finite start <= stop and step > 0");
    }
    auto count = static_cast<size_t>(std::floor((stop - start) / step * (1.0 + 1e-12) + 1e-9)) + 1;
    if (count > 10'000'000) {
        throw Error(ErrorCode::invalid_argument, "grid has too many points");
    }
    std::vector<double> out;
    out.reserve(count);
    for (size_t k = 0; k < count; k++) {
        out.push_back(start + static_cast<double>(k) * step);
    }
    return out;
}

}  // namespace dklock
