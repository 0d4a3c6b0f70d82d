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

#include "core/protocol.hpp"

#include <cmath>

#include "core/error.hpp"

namespace dklock {

namespace {

Sequence blank(const SequenceOptions &opts, std::string description) {
    Sequence seq;
    seq.frame = opts.frame;
    seq.clock_during_pulses = opts.clock_during_pulses;
    seq.description = std::move(description);
    return seq;
}

void require_precession(double detuning, const char *what) {
    if (!std::isfinite(detuning) || detuning == 0) {
        throw Error(ErrorCode::no_precession, std::string(what) + " detuning must be finite and non-zero");
    }
}

void require_non_negative(double value, const char *what) {
    if (!std::isfinite(value) || value < 0) {
        throw Error(ErrorCode::invalid_argument, std::string(what) + " must be finite and >= 0");
    }
}

bool same_detuning(double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b));
}

// Smallest j >= 0 with (2j+1) * half_period - shift >= minimum (up to rounding).
int64_t smallest_odd_multiple(double half_period, double shift, double minimum) {
    double target = minimum + shift;
    double guess = std::ceil((target / half_period - 1.0) / 2.0) - 1.0;
    if (!(guess < static_cast<double>(kMaxPlannerIndex) + 2)) {
        throw Error(ErrorCode::infeasible, "no planner index up to 1e6 satisfies the minimum interval");
    }
    auto j = static_cast<int64_t>(std::max(0.0, guess));
    for (; j <= kMaxPlannerIndex; j++) {
        double value = static_cast<double>(2 * j + 1) * half_period - shift;
        if (value >= minimum - 1e-12 * std::max(std::abs(minimum), half_period)) {
            return j;
        }
    }
    throw Error(ErrorCode::infeasible, "no planner index up to 1e6 satisfies the minimum interval");
}

}  // namespace

WriteKey WriteKey::with_area(FieldParams field, double area, double phase) {
    validate_field(field);
    double tau = area / field.rabi;
    return {std::move(field), tau, phase};
}

ScrambleKey ScrambleKey::make(FieldParams field, double tau, double phi_s, double lead) {
    return {std::move(field), tau, wrap_phase(phi_s), lead};
}

Sequence build_write_read(const WriteKey &key, double T, const SequenceOptions &opts) {
    Sequence seq = blank(opts, "write-read");
    seq.pulse(key.field, key.tau, key.phase).scan_wait(T).pulse(key.field, key.tau, key.phase);
    return seq;
}

Sequence build_reference(const WriteKey &key, double lead, double T, const SequenceOptions &opts) {
    Sequence seq = blank(opts, "write-read reference");
    seq.pulse(key.field, key.tau, key.phase).wait(lead).scan_wait(T).pulse(key.field, key.tau, key.phase);
    return seq;
}

double plan_readout(double delta_w, int64_t k) {
    require_precession(delta_w, "write-field");
    if (k < 0) {
        throw Error(ErrorCode::invalid_argument, "readout index k must be >= 0");
    }
    return static_cast<double>(2 * k + 1) * std::numbers::pi / std::abs(delta_w);
}

Sequence build_scrambled(const WriteKey &w, const ScrambleKey &s, double T, const SequenceOptions &opts) {
    Sequence seq = blank(opts, "scramble");
    seq.pulse(w.field, w.tau, w.phase)
        .wait(s.lead)
        .pulse(s.field, s.tau, wrap_phase(s.phi_s))
        .scan_wait(T)
        .pulse(w.field, w.tau, w.phase);
    return seq;
}

RetrievalPlan plan_retrieval(double delta_s, double min_t2) {
    require_precession(delta_s, "scramble-field");
    require_non_negative(min_t2, "minimum T2");
    double half = std::numbers::pi / std::abs(delta_s);
    int64_t n = smallest_odd_multiple(half, 0.0, min_t2);
    return {n, static_cast<double>(2 * n + 1) * std::numbers::pi / std::abs(delta_s), delta_s};
}

Sequence build_retrieved(const WriteKey &w, const ScrambleKey &s, const RetrievalPlan &plan, double T,
                         const SequenceOptions &opts) {
    if (!same_detuning(plan.detuning, s.field.detuning)) {
        throw Error(ErrorCode::plan_mismatch, "retrieval plan was made for a different scramble detuning");
    }
    double phi = wrap_phase(s.phi_s);
    Sequence seq = blank(opts, "retrieve");
    seq.pulse(w.field, w.tau, w.phase)
        .wait(s.lead)
        .pulse(s.field, s.tau, phi)
        .wait(plan.T2)
        .pulse(s.field, s.tau, phi)
        .scan_wait(T)
        .pulse(w.field, w.tau, w.phase);
    return seq;
}

Sequence build_double_scrambled(const WriteKey &w, const ScrambleKey &s1, const ScrambleKey &s2, double T,
                                const SequenceOptions &opts) {
    Sequence seq = blank(opts, "double-scramble");
    seq.pulse(w.field, w.tau, w.phase)
        .wait(s1.lead)
        .pulse(s1.field, s1.tau, wrap_phase(s1.phi_s))
        .wait(s2.lead)
        .pulse(s2.field, s2.tau, wrap_phase(s2.phi_s))
        .scan_wait(T)
        .pulse(w.field, w.tau, w.phase);
    return seq;
}

DoubleRetrievalPlan plan_double_retrieval(double delta_s1, double delta_s2, double tau_s2, double min_t3,
                                          double min_t2_plus_t4, bool clock_during_pulses,
                                          std::optional<double> t2_override) {
    require_precession(delta_s1, "scramble-1");
    require_precession(delta_s2, "scramble-2");
    require_non_negative(tau_s2, "tau_S2");
    require_non_negative(min_t3, "minimum T3");
    require_non_negative(min_t2_plus_t4, "minimum T2+T4");

    DoubleRetrievalPlan plan;
    plan.tau_s2 = tau_s2;
    plan.clock_during_pulses = clock_during_pulses;
    plan.detuning_s1 = delta_s1;
    plan.detuning_s2 = delta_s2;

    double half2 = std::numbers::pi / std::abs(delta_s2);
    plan.n = smallest_odd_multiple(half2, 0.0, min_t3);
    plan.T3 = static_cast<double>(2 * plan.n + 1) * std::numbers::pi / std::abs(delta_s2);

    double half1 = std::numbers::pi / std::abs(delta_s1);
    double shift = plan.T3 + (clock_during_pulses ? 2.0 * tau_s2 : 0.0);
    plan.m = smallest_odd_multiple(half1, shift, min_t2_plus_t4);
    double total = static_cast<double>(2 * plan.m + 1) * std::numbers::pi / std::abs(delta_s1);
    double slack = std::max(0.0, total - shift);

    if (t2_override) {
        double t2 = *t2_override;
        if (!std::isfinite(t2) || t2 < 0 || t2 > slack) {
            throw Error(ErrorCode::infeasible, "T2 override does not fit in the planned slack");
        }
        plan.T2 = t2;
    } else {
        plan.T2 = 0.5 * slack;
    }
    plan.T4 = slack - plan.T2;
    return plan;
}

Sequence build_double_retrieved(const WriteKey &w, const ScrambleKey &s1, const ScrambleKey &s2,
                                const DoubleRetrievalPlan &plan, double T, const SequenceOptions &opts) {
    if (!same_detuning(plan.detuning_s1, s1.field.detuning) || !same_detuning(plan.detuning_s2, s2.field.detuning)) {
        throw Error(ErrorCode::plan_mismatch, "double retrieval plan was made for different scramble detunings");
    }
    if (plan.clock_during_pulses != opts.clock_during_pulses) {
        throw Error(ErrorCode::plan_mismatch, "double retrieval plan assumes a different pulse-clock convention");
    }
    if (plan.clock_during_pulses && plan.tau_s2 != s2.tau) {
        throw Error(ErrorCode::plan_mismatch, "double retrieval plan was made for a different tau_S2");
    }
    double phi1 = wrap_phase(s1.phi_s);
    double phi2 = wrap_phase(s2.phi_s);
    Sequence seq = blank(opts, "double-retrieve");
    seq.pulse(w.field, w.tau, w.phase)
        .wait(s1.lead)
        .pulse(s1.field, s1.tau, phi1)
        .wait(plan.T2)
        .pulse(s2.field, s2.tau, phi2)
        .wait(plan.T3)
        .pulse(s2.field, s2.tau, phi2)
        .wait(plan.T4)
        .pulse(s1.field, s1.tau, phi1)
        .scan_wait(T)
        .pulse(w.field, w.tau, w.phase);
    return seq;
}

FringeScan secret_readout(const WriteKey &w, const ScrambleKey &lock, Cooperation who, std::span<const double> grid,
                          Rng &rng, const SequenceOptions &opts) {
    if (grid.empty()) {
        throw Error(ErrorCode::invalid_argument, "readout grid is empty");
    }
    if (who == Cooperation::with_scramble_key) {
        RetrievalPlan plan = plan_retrieval(lock.field.detuning, 0.0);
        FringeScan out = scan(build_retrieved(w, lock, plan, 0.0, opts), grid);
        out.description = "secret readout with scramble key";
        return out;
    }

    std::uniform_real_distribution<double> uniform(0.0, kTwoPi);
    std::vector<double> phases(grid.size());
    for (auto &phi : phases) {
        phi = uniform(rng);
    }
    FringeScan out;
    out.description = "secret readout without scramble key";
    out.clock_during_pulses = opts.clock_during_pulses;
    out.points.resize(grid.size());
    for (size_t k = 0; k < grid.size(); k++) {
        if (k > 0 && !(grid[k] > grid[k - 1])) {
            throw Error(ErrorCode::invalid_argument, "readout grid must be strictly increasing");
        }
        ScrambleKey guess = lock;
        guess.phi_s = phases[k];
        SpinState s = evolve(build_scrambled(w, guess, grid[k], opts), SpinState::ground());
        out.points[k] = {grid[k], excitation_probability(s), 0.0};
    }
    return out;
}

}  // namespace dklock
