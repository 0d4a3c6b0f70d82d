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

#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>

#include "core/error.hpp"
#include "test_util.hpp"

using namespace dklock;
using namespace dklock::testing;

namespace {

constexpr double kPi = std::numbers::pi;

ErrorCode code_of(auto &&fn) {
    try {
        fn();
    } catch (const Error &e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorCode::io;
}

double sample_variance(const std::vector<double> &xs) {
    double mean = 0;
    for (double x : xs) {
        mean += x;
    }
    mean /= static_cast<double>(xs.size());
    double ss = 0;
    for (double x : xs) {
        ss += (x - mean) * (x - mean);
    }
    return ss / static_cast<double>(xs.size() - 1);
}

// Kuiper statistic of samples on [0, 1) against the uniform distribution,
// scaled so that the 1% critical value is 2.001.
double kuiper_statistic(std::vector<double> u) {
    std::sort(u.begin(), u.end());
    double n = static_cast<double>(u.size());
    double above = 0, below = 0;
    for (size_t i = 0; i < u.size(); i++) {
        above = std::max(above, (static_cast<double>(i) + 1) / n - u[i]);
        below = std::max(below, u[i] - static_cast<double>(i) / n);
    }
    return (above + below) * (std::sqrt(n) + 0.155 + 0.24 / std::sqrt(n));
}

}  // namespace

TEST(stochastic, zero_elapsed_is_zero) {
    Rng rng(1);
    EXPECT_EQ(sample_relative_phase(kTwoPi * 1000, 0, rng), 0.0);
    EXPECT_EQ(sample_phase_drift(0, 47, rng), 0.0);
    EXPECT_EQ(code_of([&] { sample_relative_phase(1, -1, rng); }), ErrorCode::invalid_duration);
}

TEST(stochastic, diffusion_variance) {
    Rng rng(2);
    std::vector<double> xs;
    for (int k = 0; k < 10000; k++) {
        xs.push_back(sample_phase_drift(kTwoPi * 1000, 47, rng));
    }
    EXPECT_NEAR(sample_variance(xs), 2.95e5, 0.05 * 2.95e5);
    EXPECT_NEAR(sample_variance(xs) / (kTwoPi * 1000 * 47), 1.0, 0.05);
}

TEST(stochastic, diffusion_slope) {
    Rng rng(3);
    double linewidth = kTwoPi * 1000;
    std::vector<double> ts, vs;
    for (int t = 1; t <= 10; t++) {
        std::vector<double> xs;
        for (int k = 0; k < 10000; k++) {
            xs.push_back(sample_phase_drift(linewidth, t, rng));
        }
        ts.push_back(t);
        vs.push_back(sample_variance(xs));
    }
    // Least-squares line through the (t, variance) points.
    double mt = 0, mv = 0;
    for (size_t i = 0; i < ts.size(); i++) {
        mt += ts[i];
        mv += vs[i];
    }
    mt /= 10;
    mv /= 10;
    double num = 0, den = 0;
    for (size_t i = 0; i < ts.size(); i++) {
        num += (ts[i] - mt) * (vs[i] - mv);
        den += (ts[i] - mt) * (ts[i] - mt);
    }
    EXPECT_NEAR(num / den / linewidth, 1.0, 0.05);
}

TEST(stochastic, wrapped_phase_is_uniform) {
    Rng rng(4);
    std::vector<double> u;
    for (int k = 0; k < 10000; k++) {
        double phi = sample_relative_phase(100.0, 1.0, rng);
        ASSERT_GE(phi, 0);
        ASSERT_LT(phi, kTwoPi);
        u.push_back(phi / kTwoPi);
    }
    EXPECT_LT(kuiper_statistic(u), 2.001);

    // The test has power: a narrow wrapped normal is rejected.
    std::vector<double> narrow;
    for (int k = 0; k < 10000; k++) {
        narrow.push_back(sample_relative_phase(1.0, 1.0, rng) / kTwoPi);
    }
    EXPECT_GT(kuiper_statistic(narrow), 2.001);
}

TEST(stochastic, measurement_extremes) {
    Rng rng(5);
    NoiseModel model;
    auto zero = simulate_measurement(0, model, rng);
    EXPECT_EQ(zero.mean, 0.0);
    EXPECT_EQ(zero.sd, 0.0);
    auto one = simulate_measurement(1, model, rng);
    EXPECT_EQ(one.mean, 1.0);
    EXPECT_EQ(one.sd, 0.0);
    auto exact = simulate_measurement(0.3, NoiseModel::noiseless(), rng);
    EXPECT_EQ(exact.mean, 0.3);
    EXPECT_EQ(exact.sd, 0.0);
    EXPECT_EQ(code_of([&] { simulate_measurement(1.5, model, rng); }), ErrorCode::invalid_argument);
}

TEST(stochastic, measurement_statistics) {
    NoiseModel model;
    double p = 0.5;
    std::vector<double> means;
    double shot_var = 0;
    for (int trial = 0; trial < 1000; trial++) {
        Rng rng = trial_stream(17, trial);
        auto m = simulate_measurement(p, model, rng);
        means.push_back(m.mean);
        shot_var += m.sd * m.sd;
    }
    double n = static_cast<double>(model.atom_count * model.repeats);
    double expected = std::sqrt(p * (1 - p) / n);
    EXPECT_NEAR(std::sqrt(sample_variance(means)) / expected, 1.0, 0.2);

    // Per-shot spread matches the binomial sd of one shot.
    EXPECT_NEAR(std::sqrt(shot_var / 1000) / std::sqrt(p * (1 - p) / model.atom_count), 1.0, 0.05);

    double pooled = 0;
    for (double m : means) {
        pooled += m;
    }
    pooled /= 1000;
    EXPECT_LE(std::abs(pooled - p), 3 * expected / std::sqrt(1000.0));
}

TEST(stochastic, measurement_unbiased) {
    NoiseModel model;
    model.atom_count = 200;
    model.repeats = 3;
    for (double p : {0.1, 0.37, 0.9}) {
        double sum = 0;
        for (int trial = 0; trial < 10000; trial++) {
            Rng rng = trial_stream(23, trial);
            sum += simulate_measurement(p, model, rng).mean;
        }
        double se = std::sqrt(p * (1 - p) / (200.0 * 3 * 10000));
        EXPECT_LE(std::abs(sum / 10000 - p), 3 * se) << p;
    }
}

TEST(stochastic, contrast_decay) {
    FringeScan s;
    s.points = {{0, 1, 0.1}, {0.01, 1, 0.1}, {0.02, 0.2, 0.0}};
    auto same = apply_contrast_decay(s, std::numeric_limits<double>::infinity());
    EXPECT_EQ(same, s);
    auto d = apply_contrast_decay(s, 0.01);
    EXPECT_EQ(d.points[0].p, 1.0);
    EXPECT_NEAR(d.points[1].p, 0.5 + 0.5 / std::numbers::e, 1e-15);
    EXPECT_NEAR(d.points[1].p, 0.684, 1e-3);
    EXPECT_NEAR(d.points[1].sd, 0.1 / std::numbers::e, 1e-15);
    EXPECT_NEAR(d.points[2].p, 0.5 - 0.3 * std::exp(-2.0), 1e-15);
    EXPECT_EQ(code_of([&] { apply_contrast_decay(s, 0); }), ErrorCode::invalid_duration);
}

TEST(stochastic, noiseless_single_trial) {
    WriteKey w = table1_write_key();
    ScrambleKey s = table1_scramble_key(0.0);
    auto grid = table1_grid();
    auto ens = monte_carlo_scramble(w, s, grid, 1, NoiseModel::noiseless());
    ASSERT_EQ(ens.trials.size(), 1u);
    EXPECT_EQ(ens.phases[0], 0.0);
    auto direct = scan(build_scrambled(w, s, 0), grid);
    EXPECT_LE(max_abs_difference(ens.trials[0], direct), 0.0);
    EXPECT_LE(max_abs_difference(ens.pooled, direct), 0.0);
}

TEST(stochastic, ensemble_is_reproducible) {
    WriteKey w = table1_write_key();
    auto grid = make_grid(0, 10e-3, 0.5e-3);
    NoiseModel model;
    model.seed = 99;
    auto a = monte_carlo_scramble(w, table1_scramble_key(0), grid, 24, model);
    auto b = monte_carlo_scramble(w, table1_scramble_key(0), grid, 24, model);
    EXPECT_EQ(a.phases, b.phases);
    for (size_t i = 0; i < a.trials.size(); i++) {
        EXPECT_EQ(a.trials[i], b.trials[i]);
    }
    EXPECT_EQ(a.pooled, b.pooled);
    model.seed = 100;
    auto c = monte_carlo_scramble(w, table1_scramble_key(0), grid, 24, model);
    EXPECT_NE(a.phases, c.phases);
}

TEST(stochastic, ensemble_error_bars_are_large) {
    WriteKey w = table1_write_key();
    auto grid = table1_grid();
    NoiseModel model;
    auto ens = monte_carlo_scramble(w, table1_scramble_key(0), grid, 100, model);
    double readout_sd = std::sqrt(0.25 / static_cast<double>(model.atom_count * model.repeats));
    for (const auto &pt : ens.pooled.points) {
        EXPECT_GT(pt.sd, 50 * readout_sd) << pt.T;
    }
}

TEST(stochastic, ensemble_error_bars_peak_between_extrema) {
    // Without contrast decay the envelope does not mask the phase-induced spread.
    NoiseModel model;
    model.contrast_time_write = std::numeric_limits<double>::infinity();
    auto ens = monte_carlo_scramble(table1_write_key(), table1_scramble_key(0), table1_grid(), 100, model);
    double lo = 1, hi = 0;
    for (const auto &pt : ens.pooled.points) {
        lo = std::min(lo, pt.p);
        hi = std::max(hi, pt.p);
    }
    double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    double sd_mid = 0, sd_edge = 0;
    int n_mid = 0, n_edge = 0;
    for (const auto &pt : ens.pooled.points) {
        double x = std::abs(pt.p - mid) / half;
        if (x < 0.3) {
            sd_mid += pt.sd;
            n_mid++;
        } else if (x > 0.8) {
            sd_edge += pt.sd;
            n_edge++;
        }
    }
    ASSERT_GT(n_mid, 0);
    ASSERT_GT(n_edge, 0);
    EXPECT_GT(sd_mid / n_mid, sd_edge / n_edge);
}

TEST(stochastic, model_validation) {
    NoiseModel m;
    m.repeats = 0;
    EXPECT_EQ(code_of([&] { m.validate(); }), ErrorCode::invalid_argument);
    m = NoiseModel{};
    m.contrast_time_write = 0;
    EXPECT_EQ(code_of([&] { m.validate(); }), ErrorCode::invalid_argument);
    EXPECT_EQ(code_of([&] {
                  monte_carlo_scramble(table1_write_key(), table1_scramble_key(0), table1_grid(), 0, NoiseModel{});
              }),
              ErrorCode::invalid_argument);
}
