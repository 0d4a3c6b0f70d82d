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

#include "core/stochastic.hpp"

#include <cmath>

#include "core/error.hpp"

namespace dklock {

NoiseModel NoiseModel::noiseless() {
    NoiseModel m;
    m.linewidth = 0.0;
    m.atom_count = 0;
    m.repeats = 1;
    m.contrast_time_write = std::numeric_limits<double>::infinity();
    m.contrast_time_scramble = std::numeric_limits<double>::infinity();
    return m;
}

void NoiseModel::validate() const {
    if (!(linewidth >= 0) || !std::isfinite(linewidth) || !(elapsed >= 0) || !std::isfinite(elapsed)) {
        throw Error(ErrorCode::invalid_argument, "linewidth and elapsed time must be finite and >= 0");
    }
    if (atom_count < 0 || repeats < 1) {
        throw Error(ErrorCode::invalid_argument, "need atom_count >= 0 and repeats >= 1");
    }
    if (!(contrast_time_write > 0) || !(contrast_time_scramble > 0)) {
        throw Error(ErrorCode::invalid_argument, "contrast times must be > 0");
    }
}

double sample_phase_drift(double linewidth, double elapsed, Rng &rng) {
    if (!(elapsed >= 0) || !std::isfinite(elapsed)) {
        throw Error(ErrorCode::invalid_duration, "elapsed time must be finite and >= 0");
    }
    if (!(linewidth >= 0) || !std::isfinite(linewidth)) {
        throw Error(ErrorCode::invalid_argument, "linewidth must be finite and >= 0");
    }
    double variance = linewidth * elapsed;
    if (variance == 0) {
        return 0.0;
    }
    std::normal_distribution<double> gauss(0.0, std::sqrt(variance));
    return gauss(rng);
}

double sample_relative_phase(double linewidth, double elapsed, Rng &rng) {
    return wrap_phase(sample_phase_drift(linewidth, elapsed, rng));
}

Measurement simulate_measurement(double p_true, const NoiseModel &model, Rng &rng) {
    model.validate();
    if (!(p_true >= 0 && p_true <= 1)) {
        throw Error(ErrorCode::invalid_argument, "probability must lie in [0,1]");
    }
    if (model.exact_readout()) {
        return {p_true, 0.0};
    }
    std::binomial_distribution<int64_t> counts(model.atom_count, p_true);
    auto n = static_cast<double>(model.atom_count);
    std::vector<double> shots(static_cast<size_t>(model.repeats));
    double sum = 0.0;
    for (auto &x : shots) {
        x = static_cast<double>(counts(rng)) / n;
        sum += x;
    }
    double mean = sum / static_cast<double>(shots.size());
    if (shots.size() < 2) {
        return {mean, 0.0};
    }
    double ss = 0.0;
    for (double x : shots) {
        ss += (x - mean) * (x - mean);
    }
    return {mean, std::sqrt(ss / static_cast<double>(shots.size() - 1))};
}

FringeScan apply_contrast_decay(const FringeScan &scan, double tau_c) {
    if (!(tau_c > 0)) {
        throw Error(ErrorCode::invalid_duration, "contrast time must be > 0");
    }
    FringeScan out = scan;
    for (auto &pt : out.points) {
        double envelope = std::exp(-pt.T / tau_c);
        pt.p = 0.5 + (pt.p - 0.5) * envelope;
        pt.sd *= envelope;
    }
    return out;
}

FringeScan apply_measurement_noise(const FringeScan &scan, const NoiseModel &model, Rng &rng) {
    FringeScan out = scan;
    for (auto &pt : out.points) {
        Measurement m = simulate_measurement(pt.p, model, rng);
        pt.p = m.mean;
        pt.sd = m.sd;
    }
    return out;
}

ScrambleEnsemble monte_carlo_scramble(const WriteKey &w, const ScrambleKey &s, std::span<const double> grid,
                                      int64_t trials, const NoiseModel &model, const SequenceOptions &opts) {
    model.validate();
    if (trials < 1) {
        throw Error(ErrorCode::invalid_argument, "need at least one trial");
    }
    ScrambleEnsemble out;
    auto count = static_cast<size_t>(trials);
    out.trials.resize(count);
    out.phases.resize(count);
    parallel_for(count, [&](size_t i) {
        Rng rng = trial_stream(model.seed, i);
        ScrambleKey key = s;
        key.phi_s = sample_relative_phase(model.linewidth, model.elapsed, rng);
        // Points of one trial are evaluated serially; trials are the parallel unit.
        FringeScan sc;
        sc.description = "scramble trial";
        sc.clock_during_pulses = opts.clock_during_pulses;
        for (double T : grid) {
            SpinState st = evolve(build_scrambled(w, key, T, opts), SpinState::ground());
            sc.points.push_back({T, excitation_probability(st), 0.0});
        }
        if (std::isfinite(model.contrast_time_write)) {
            sc = apply_contrast_decay(sc, model.contrast_time_write);
        }
        out.trials[i] = apply_measurement_noise(sc, model, rng);
        out.phases[i] = key.phi_s;
    });

    out.pooled.description = "scramble ensemble";
    out.pooled.clock_during_pulses = opts.clock_during_pulses;
    for (size_t k = 0; k < grid.size(); k++) {
        double sum = 0.0;
        for (const auto &t : out.trials) {
            sum += t.points[k].p;
        }
        double mean = sum / static_cast<double>(count);
        double ss = 0.0;
        for (const auto &t : out.trials) {
            ss += (t.points[k].p - mean) * (t.points[k].p - mean);
        }
        double sd = count > 1 ? std::sqrt(ss / static_cast<double>(count - 1)) : 0.0;
        out.pooled.points.push_back({grid[k], mean, sd});
    }
    return out;
}

}  // namespace dklock
