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

#ifndef DKLOCK_CORE_STOCHASTIC_HPP
#define DKLOCK_CORE_STOCHASTIC_HPP

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "core/protocol.hpp"
#include "core/random.hpp"
#include "core/sequence.hpp"

namespace dklock {

/// Noise sources of a simulated run. Defaults follow the experiment: 1 kHz
/// laser linewidth, 47 s between shots, 5e4 atoms, five repeats per point,
/// and contrast times at their lower bounds (30 write-field Rabi cycles, 100
/// scramble-field Rabi cycles).
struct NoiseModel {
    double linewidth = kTwoPi * 1000.0;
    double elapsed = 47.0;
    int64_t atom_count = 50'000;
    int64_t repeats = 5;
    double contrast_time_write = 30.0 / 565.0;
    double contrast_time_scramble = 100.0 / 169.0;
    uint64_t seed = 0;

    /// No phase diffusion, exact readout (atom_count == 0), no contrast decay.
    static NoiseModel noiseless();

    bool exact_readout() const { return atom_count == 0; }

    void validate() const;

    bool operator==(const NoiseModel &) const = default;
};

/// Unwrapped phase after `elapsed` seconds of diffusion at `linewidth`
/// (variance linewidth * elapsed).
double sample_phase_drift(double linewidth, double elapsed, Rng &rng);

/// Same draw reduced to [0, 2pi).
double sample_relative_phase(double linewidth, double elapsed, Rng &rng);

struct Measurement {
    double mean = 0.0;
    double sd = 0.0;
};

/// `repeats` binomial shots of `atom_count` atoms; mean and sample standard
/// deviation of the excited fraction. Exact readout returns (p_true, 0).
Measurement simulate_measurement(double p_true, const NoiseModel &model, Rng &rng);

/// p(T) -> 0.5 + (p(T) - 0.5) exp(-T / tau_c); sd scales by the same factor.
FringeScan apply_contrast_decay(const FringeScan &scan, double tau_c);

/// Replaces each point by a simulated measurement of it.
FringeScan apply_measurement_noise(const FringeScan &scan, const NoiseModel &model, Rng &rng);

struct ScrambleEnsemble {
    std::vector<FringeScan> trials;
    std::vector<double> phases;
    /// Per-T mean and standard deviation across trials.
    FringeScan pooled;
};

/// Per trial: phi_S from the phase-diffusion model, the scrambled scan over
/// `grid`, write-field contrast decay, then measurement noise. Trial i uses
/// trial_stream(model.seed, i).
ScrambleEnsemble monte_carlo_scramble(const WriteKey &w, const ScrambleKey &s, std::span<const double> grid,
                                      int64_t trials, const NoiseModel &model, const SequenceOptions &opts = {});

}  // namespace dklock

#endif
