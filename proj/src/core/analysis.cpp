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

#include "core/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "core/error.hpp"

namespace dklock {

namespace {

using Params = Eigen::Matrix<double, 5, 1>;
enum { kOffset, kAmplitude, kFrequency, kPhase, kRate };

struct Problem {
    std::vector<double> t;
    std::vector<double> y;
    std::vector<double> sqrt_w;
};

double weighted_cost(const Problem &pr, const Params &th) {
    double cost = 0.0;
    for (size_t i = 0; i < pr.t.size(); i++) {
        double e = std::exp(-th[kRate] * pr.t[i]);
        double model = th[kOffset] + th[kAmplitude] * e * std::cos(kTwoPi * th[kFrequency] * pr.t[i] + th[kPhase]);
        double r = pr.sqrt_w[i] * (pr.y[i] - model);
        cost += r * r;
    }
    return cost;
}

struct LinearSeed {
    double cost;
    Params params;
};

// Offset and quadratures solved exactly at fixed frequency, no decay.
LinearSeed linear_fit_at(const Problem &pr, double f) {
    Eigen::Matrix3d ata = Eigen::Matrix3d::Zero();
    Eigen::Vector3d atb = Eigen::Vector3d::Zero();
    for (size_t i = 0; i < pr.t.size(); i++) {
        double x = kTwoPi * f * pr.t[i];
        Eigen::Vector3d row(1.0, std::cos(x), std::sin(x));
        row *= pr.sqrt_w[i];
        ata += row * row.transpose();
        atb += row * (pr.sqrt_w[i] * pr.y[i]);
    }
    Eigen::Vector3d c = ata.ldlt().solve(atb);
    Params th;
    th << c[0], std::hypot(c[1], c[2]), f, std::atan2(-c[2], c[1]), 0.0;
    if (!th.allFinite()) {
        return {std::numeric_limits<double>::infinity(), th};
    }
    return {weighted_cost(pr, th), th};
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

double FitResult::evaluate(double T) const {
    double envelope = std::isinf(decay_time) ? 1.0 : std::exp(-T / decay_time);
    return offset + amplitude * envelope * std::cos(kTwoPi * frequency * T + phase);
}

FitResult fit_damped_sinusoid(const FringeScan &scan, const FitOptions &options) {
    const size_t n = scan.points.size();
    if (n < 8) {
        throw Error(ErrorCode::fit_failure, "damped-sinusoid fit needs at least 8 points, got " + std::to_string(n));
    }
    Problem pr;
    pr.t = scan.times();
    pr.y = scan.probabilities();
    for (size_t i = 1; i < n; i++) {
        if (!(pr.t[i] > pr.t[i - 1])) {
            throw Error(ErrorCode::invalid_argument, "fit input T values must be strictly increasing");
        }
    }

    std::vector<double> positive_sd;
    for (const auto &pt : scan.points) {
        if (pt.sd > 0) {
            positive_sd.push_back(pt.sd);
        }
    }
    pr.sqrt_w.assign(n, 1.0);
    if (!positive_sd.empty()) {
        // Points reported with sd == 0 would otherwise get infinite weight.
        double floor = 0.1 * median(positive_sd);
        for (size_t i = 0; i < n; i++) {
            pr.sqrt_w[i] = 1.0 / std::max(scan.points[i].sd, floor);
        }
    }

    double mean = 0.0;
    for (double v : pr.y) {
        mean += v;
    }
    mean /= static_cast<double>(n);
    double flat_ss = 0.0;
    for (double v : pr.y) {
        flat_ss += (v - mean) * (v - mean);
    }
    FitResult out;
    out.residual_threshold = std::sqrt(flat_ss / static_cast<double>(n));
    if (out.residual_threshold <= 1e-12 * std::max(1.0, std::abs(mean))) {
        out.offset = mean;
        out.rms_residual = out.residual_threshold;
        return out;
    }

    // Coarse frequency grid, then a finer pass around the best cell.
    std::vector<double> dt;
    for (size_t i = 1; i < n; i++) {
        dt.push_back(pr.t[i] - pr.t[i - 1]);
    }
    double nyquist = 0.5 / median(dt);
    int grid = std::max(2, options.coarse_frequencies);
    double cell = nyquist / grid;
    LinearSeed best{std::numeric_limits<double>::infinity(), Params::Zero()};
    int best_k = 1;
    for (int k = 1; k <= grid; k++) {
        LinearSeed s = linear_fit_at(pr, cell * k);
        if (s.cost < best.cost) {
            best = s;
            best_k = k;
        }
    }
    {
        double lo = cell * std::max(best_k - 1, 0);
        double hi = cell * std::min(best_k + 1, grid);
        const int sub = 64;
        for (int j = 1; j < sub; j++) {
            LinearSeed s = linear_fit_at(pr, lo + (hi - lo) * j / sub);
            if (s.cost < best.cost) {
                best = s;
            }
        }
    }

    double span = std::max(pr.t.back() - pr.t.front(), 1e-300);
    Params typical;
    typical << 1.0, 1.0, 1.0 / span, 1.0, 1.0 / span;

    Params th = best.params;
    double cost = best.cost;
    double lambda = 1e-3;
    bool terminated = false;
    int it = 0;
    for (; it < options.max_iterations; it++) {
        Eigen::Matrix<double, 5, 5> jtj = Eigen::Matrix<double, 5, 5>::Zero();
        Params jtr = Params::Zero();
        for (size_t i = 0; i < n; i++) {
            double t = pr.t[i];
            double e = std::exp(-th[kRate] * t);
            double x = kTwoPi * th[kFrequency] * t + th[kPhase];
            double c = std::cos(x);
            double s = std::sin(x);
            double model = th[kOffset] + th[kAmplitude] * e * c;
            Params row;
            row << 1.0, e * c, -th[kAmplitude] * e * s * kTwoPi * t, -th[kAmplitude] * e * s,
                -t * th[kAmplitude] * e * c;
            row *= pr.sqrt_w[i];
            jtj += row * row.transpose();
            jtr += row * (pr.sqrt_w[i] * (pr.y[i] - model));
        }

        bool accepted = false;
        while (lambda < 1e16) {
            Eigen::Matrix<double, 5, 5> a = jtj;
            for (int d = 0; d < 5; d++) {
                a(d, d) += lambda * std::max(jtj(d, d), 1e-300);
            }
            Params step = a.ldlt().solve(jtr);
            if (th[kRate] <= 0 && step[kRate] < 0) {
                // Damping pinned at its bound: solve for the other four parameters.
                a.row(kRate).setZero();
                a.col(kRate).setZero();
                a(kRate, kRate) = 1.0;
                Params rhs = jtr;
                rhs[kRate] = 0.0;
                step = a.ldlt().solve(rhs);
            }
            Params trial = th + step;
            trial[kRate] = std::max(trial[kRate], 0.0);
            double trial_cost = step.allFinite() ? weighted_cost(pr, trial) : std::numeric_limits<double>::infinity();
            if (trial_cost <= cost) {
                Params taken = trial - th;
                th = trial;
                cost = trial_cost;
                lambda = std::max(lambda * 0.1, 1e-15);
                accepted = true;
                bool small = true;
                for (int d = 0; d < 5; d++) {
                    if (std::abs(taken[d]) > options.relative_step * (std::abs(th[d]) + typical[d])) {
                        small = false;
                    }
                }
                if (small) {
                    terminated = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if (!accepted) {
            // No damping level lowers the cost any further.
            terminated = true;
        }
        if (terminated) {
            it++;
            break;
        }
    }

    if (th[kAmplitude] < 0) {
        th[kAmplitude] = -th[kAmplitude];
        th[kPhase] += std::numbers::pi;
    }
    if (th[kFrequency] < 0) {
        th[kFrequency] = -th[kFrequency];
        th[kPhase] = -th[kPhase];
    }
    out.offset = th[kOffset];
    out.amplitude = th[kAmplitude];
    out.frequency = th[kFrequency];
    out.phase = wrap_phase(th[kPhase]);
    // Damping invisible over the scanned window is reported as none.
    out.decay_time = th[kRate] * span > 1e-9 ? 1.0 / th[kRate] : std::numeric_limits<double>::infinity();
    out.iterations = it;
    double ss = 0.0;
    for (size_t i = 0; i < n; i++) {
        double r = pr.y[i] - out.evaluate(pr.t[i]);
        ss += r * r;
    }
    out.rms_residual = std::sqrt(ss / static_cast<double>(n));
    out.converged = terminated && th.allFinite() && out.amplitude > 0 && out.rms_residual <= out.residual_threshold;
    return out;
}

double fringe_visibility(const FringeScan &scan) {
    if (scan.points.empty()) {
        throw Error(ErrorCode::invalid_argument, "visibility of an empty scan");
    }
    double hi = scan.points.front().p;
    double lo = hi;
    for (const auto &pt : scan.points) {
        hi = std::max(hi, pt.p);
        lo = std::min(lo, pt.p);
    }
    double sum = hi + lo;
    return sum == 0 ? 0.0 : (hi - lo) / sum;
}

double covering_arc(std::span<const double> phases) {
    if (phases.empty()) {
        return 0.0;
    }
    std::vector<double> a;
    a.reserve(phases.size());
    for (double p : phases) {
        a.push_back(wrap_phase(p));
    }
    std::sort(a.begin(), a.end());
    double largest_gap = kTwoPi - (a.back() - a.front());
    for (size_t i = 1; i < a.size(); i++) {
        largest_gap = std::max(largest_gap, a[i] - a[i - 1]);
    }
    return kTwoPi - largest_gap;
}

double phase_spread(std::span<const FitResult> fits) {
    if (fits.size() < 2) {
        throw Error(ErrorCode::invalid_argument, "phase spread needs at least two fits");
    }
    std::string bad;
    std::vector<double> phases;
    for (size_t i = 0; i < fits.size(); i++) {
        if (!fits[i].converged) {
            bad += (bad.empty() ? "" : ", ") + std::to_string(i);
            continue;
        }
        double phase = fits[i].phase;
        if (fits[i].amplitude < 0) {
            phase += std::numbers::pi;
        }
        phases.push_back(phase);
    }
    if (!bad.empty()) {
        throw Error(ErrorCode::fit_failure, "phase spread over non-converged fits at indices " + bad);
    }
    return covering_arc(phases);
}

}  // namespace dklock
