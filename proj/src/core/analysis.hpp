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

#ifndef DKLOCK_CORE_ANALYSIS_HPP
#define DKLOCK_CORE_ANALYSIS_HPP

#include <limits>
#include <span>

#include "core/sequence.hpp"

namespace dklock {

/// p(T) = offset + amplitude * exp(-T / decay_time) * cos(2 pi frequency T + phase)
struct FitResult {
    double amplitude = 0.0;
    double frequency = 0.0;
    double phase = 0.0;
    double offset = 0.0;
    double decay_time = std::numeric_limits<double>::infinity();
    double rms_residual = 0.0;
    /// rms of the data about its mean; a converged fit must not exceed it.
    double residual_threshold = 0.0;
    bool converged = false;
    int iterations = 0;

    double evaluate(double T) const;
};

struct FitOptions {
    int coarse_frequencies = 512;
    int max_iterations = 200;
    double relative_step = 1e-10;
};

/// Least-squares damped-sinusoid fit. Frequencies are seeded by a coarse
/// grid search over (0, Nyquist] with the linear part solved exactly at each
/// grid frequency, then refined with damped Gauss-Newton (Levenberg-Marquardt)
/// steps. Points are weighted by 1/sd^2 when any sd is non-zero.
///
/// Throws ErrorCode::fit_failure for fewer than 8 points and
/// ErrorCode::invalid_argument when T is not strictly increasing. Constant
/// input returns amplitude 0 with converged = false.
FitResult fit_damped_sinusoid(const FringeScan &scan, const FitOptions &options = {});

/// (max p - min p) / (max p + min p); 0 when max + min == 0.
double fringe_visibility(const FringeScan &scan);

/// Length of the smallest arc of the circle containing every angle.
double covering_arc(std::span<const double> phases);

/// covering_arc of the fitted phases. Needs >= 2 fits, all converged;
/// otherwise throws ErrorCode::fit_failure naming the offending indices.
double phase_spread(std::span<const FitResult> fits);

}  // namespace dklock

#endif
