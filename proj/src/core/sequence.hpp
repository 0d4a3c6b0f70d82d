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

#ifndef DKLOCK_CORE_SEQUENCE_HPP
#define DKLOCK_CORE_SEQUENCE_HPP

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "core/spinor.hpp"

namespace dklock {

/// A rectangular pulse. `phase_offset` is the field's constant phase: 0 for
/// the write field, phi_S for a scramble field.
struct PulseSpec {
    FieldParams field;
    double tau = 0.0;
    double phase_offset = 0.0;

    bool operator==(const PulseSpec &) const = default;
};

struct Wait {
    double duration = 0.0;
    /// Marks the wait whose duration `scan` substitutes.
    bool scan_variable = false;

    bool operator==(const Wait &) const = default;
};

using Event = std::variant<Wait, PulseSpec>;

struct Sequence {
    std::vector<Event> events;
    FrameConvention frame;
    /// When set, the timeline clock also advances by each pulse's duration.
    bool clock_during_pulses = false;
    /// Timeline time of the first event; lets sequences be chained.
    double start_time = 0.0;
    std::string description;

    Sequence &pulse(const FieldParams &field, double tau, double phase_offset);
    Sequence &wait(double duration);
    Sequence &scan_wait(double duration);

    /// Total timeline duration under the current clock convention.
    double duration() const;

    /// Throws ErrorCode::invalid_sequence / invalid_duration / invalid_field.
    void validate() const;

    bool operator==(const Sequence &) const = default;
};

struct TimedPulse {
    PulseSpec pulse;
    double start_time = 0.0;
    double phase_argument = 0.0;
};

/// Start time and phase argument (phase_rate * start + offset) of every pulse.
std::vector<TimedPulse> compile_timeline(const Sequence &seq);

/// Applies the operator product right-to-left in timeline order.
SpinState evolve(const Sequence &seq, const SpinState &initial);

struct FringePoint {
    double T = 0.0;
    double p = 0.0;
    double sd = 0.0;

    bool operator==(const FringePoint &) const = default;
};

struct FringeScan {
    std::vector<FringePoint> points;
    std::string description;
    std::string scan_variable = "T";
    bool clock_during_pulses = false;

    size_t size() const { return points.size(); }
    std::vector<double> times() const;
    std::vector<double> probabilities() const;

    /// Strictly increasing T, p in [0,1], sd >= 0.
    void validate() const;

    bool operator==(const FringeScan &) const = default;
};

/// Evolves `tmpl` from |g> once per grid value substituted into its single
/// scan-variable wait. Grid points are spread over worker threads; the
/// result is always in grid order.
FringeScan scan(const Sequence &tmpl, std::span<const double> grid);

/// Inclusive arithmetic grid start, start+step, ... up to stop. The stop value
/// is kept when it lies on the grid up to rounding.
std::vector<double> make_grid(double start, double stop, double step);

/// Runs body(i) for i in [0, count) on up to hardware_concurrency threads.
template <typename Body>
void parallel_for(size_t count, Body &&body);

}  // namespace dklock

#include "core/parallel.inl"

#endif
