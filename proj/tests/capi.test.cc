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

#include "dklock/dklock.h"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <string>
#include <vector>

namespace {

constexpr double kPi = std::numbers::pi;

const std::string kTable1 = std::string(DKLOCK_SOURCE_DIR) + "/configs/table1.cfg";

struct Scan {
    dkl_scan *p = nullptr;
    ~Scan() { dkl_scan_destroy(p); }
};

struct Seq {
    dkl_sequence *p = nullptr;
    ~Seq() { dkl_sequence_destroy(p); }
};

struct Config {
    dkl_config *p = nullptr;
    ~Config() { dkl_config_destroy(p); }
};

std::string take(char *s) {
    std::string out = s == nullptr ? "" : s;
    dkl_string_free(s);
    return out;
}

}  // namespace

TEST(capi, dynamics) {
    dkl_field f{1000.0, 0.0};
    double u[8];
    ASSERT_EQ(dkl_pulse_unitary(&f, kPi / 1000.0, 0, u), DKL_OK);
    EXPECT_NEAR(u[0], 0, 1e-15);
    EXPECT_NEAR(u[3], -1, 1e-15);
    EXPECT_NEAR(u[5], -1, 1e-15);

    double w = 0;
    dkl_field table{2 * kPi * 565, 2 * kPi * 110};
    ASSERT_EQ(dkl_effective_rabi(&table, &w), DKL_OK);
    EXPECT_NEAR(w / (2 * kPi), std::hypot(565.0, 110.0), 1e-9);

    ASSERT_EQ(dkl_free_unitary(DKL_FRAME_LAB, 2 * kPi * 1000, 0.5e-3, u), DKL_OK);
    EXPECT_NEAR(u[1], 1, 1e-15);
    EXPECT_NEAR(u[7], -1, 1e-15);

    double p = 0;
    dkl_field resonant{2 * kPi * 565, 0};
    ASSERT_EQ(dkl_closed_form_ramsey(&resonant, 0.25 / 565, 3e-3, &p), DKL_OK);
    EXPECT_NEAR(p, 1, 1e-12);

    dkl_state half{std::sqrt(0.5), 0, 0, std::sqrt(0.5)};
    ASSERT_EQ(dkl_excitation_probability(&half, &p), DKL_OK);
    EXPECT_NEAR(p, 0.5, 1e-15);
}

TEST(capi, errors) {
    dkl_field bad{-1, 0};
    double u[8];
    EXPECT_EQ(dkl_pulse_unitary(&bad, 1e-3, 0, u), DKL_ERR_INVALID_FIELD);
    EXPECT_NE(std::strlen(dkl_last_error()), 0u);
    dkl_field ok{1, 0};
    EXPECT_EQ(dkl_pulse_unitary(&ok, -1, 0, u), DKL_ERR_INVALID_DURATION);
    EXPECT_EQ(dkl_pulse_unitary(nullptr, 1, 0, u), DKL_ERR_INVALID_ARGUMENT);
    dkl_state unnormalized{1, 0, 1, 0};
    double p;
    EXPECT_EQ(dkl_excitation_probability(&unnormalized, &p), DKL_ERR_DEGRADED_STATE);
    EXPECT_EQ(dkl_pulse_unitary(&ok, 1, 0, u), DKL_OK);
    EXPECT_STREQ(dkl_last_error(), "");
    EXPECT_STREQ(dkl_status_string(DKL_ERR_INFEASIBLE), "infeasible");
    EXPECT_NE(std::string(dkl_version()), "");
}

TEST(capi, sequence_scan_and_fit) {
    Seq seq;
    ASSERT_EQ(dkl_sequence_create(DKL_FRAME_ROTATING, 0, 0, &seq.p), DKL_OK);
    dkl_field w{2 * kPi * 565, 2 * kPi * 110};
    ASSERT_EQ(dkl_sequence_add_pulse(seq.p, &w, 0.44e-3, 0), DKL_OK);
    ASSERT_EQ(dkl_sequence_add_wait(seq.p, 0, 1), DKL_OK);
    ASSERT_EQ(dkl_sequence_add_pulse(seq.p, &w, 0.44e-3, 0), DKL_OK);

    std::vector<double> grid;
    for (int k = 0; k <= 200; k++) {
        grid.push_back(k * 1e-4);
    }
    Scan scan;
    ASSERT_EQ(dkl_sequence_scan(seq.p, grid.data(), grid.size(), &scan.p), DKL_OK);
    ASSERT_EQ(dkl_scan_size(scan.p), 201u);
    double T, p, sd;
    ASSERT_EQ(dkl_scan_point(scan.p, 200, &T, &p, &sd), DKL_OK);
    EXPECT_DOUBLE_EQ(T, 0.02);
    EXPECT_EQ(dkl_scan_point(scan.p, 201, &T, &p, &sd), DKL_ERR_INVALID_ARGUMENT);

    dkl_fit_result fit;
    ASSERT_EQ(dkl_scan_fit(scan.p, &fit), DKL_OK);
    EXPECT_EQ(fit.converged, 1);
    EXPECT_NEAR(fit.frequency_hz, 110, 0.11);

    double v;
    ASSERT_EQ(dkl_scan_visibility(scan.p, &v), DKL_OK);
    EXPECT_GT(v, 0.9);

    char *csv = nullptr;
    ASSERT_EQ(dkl_scan_to_csv(scan.p, &csv), DKL_OK);
    EXPECT_EQ(take(csv).rfind("T_s,P_e,sd\n0,", 0), 0u);

    dkl_state g{1, 0, 0, 0}, out;
    Seq no_scan;
    ASSERT_EQ(dkl_sequence_create(DKL_FRAME_ROTATING, 0, 0, &no_scan.p), DKL_OK);
    ASSERT_EQ(dkl_sequence_add_pulse(no_scan.p, &w, 0.44e-3, 0), DKL_OK);
    ASSERT_EQ(dkl_sequence_evolve(no_scan.p, &g, &out), DKL_OK);
    EXPECT_NEAR(out.g_re * out.g_re + out.g_im * out.g_im + out.e_re * out.e_re + out.e_im * out.e_im, 1, 1e-12);
    Scan none;
    EXPECT_EQ(dkl_sequence_scan(no_scan.p, grid.data(), grid.size(), &none.p), DKL_ERR_INVALID_SEQUENCE);
    EXPECT_EQ(none.p, nullptr);
}

TEST(capi, planners) {
    int64_t n;
    double t2;
    ASSERT_EQ(dkl_plan_retrieval(2 * kPi * 100, 1e-3, &n, &t2), DKL_OK);
    EXPECT_EQ(n, 0);
    EXPECT_NEAR(t2, 5e-3, 1e-15);
    EXPECT_EQ(dkl_plan_retrieval(0, 1e-3, &n, &t2), DKL_ERR_NO_PRECESSION);

    double t;
    ASSERT_EQ(dkl_plan_readout(2 * kPi * 110, 1, &t), DKL_OK);
    EXPECT_NEAR(t, 3 / 220.0, 1e-15);

    dkl_double_plan plan;
    ASSERT_EQ(dkl_plan_double_retrieval(2 * kPi * 100, 2 * kPi * 100, 1.48e-3, 1e-3, 1e-3, 1, &plan), DKL_OK);
    EXPECT_EQ(plan.m, 1);
    EXPECT_NEAR(plan.t2, 3.52e-3, 1e-15);
    EXPECT_EQ(dkl_plan_double_retrieval(2 * kPi * 100, 2 * kPi * 100, 1.48e-3, 0, 1e6, 0, &plan),
              DKL_ERR_INFEASIBLE);
}

TEST(capi, config_and_run) {
    Config cfg;
    ASSERT_EQ(dkl_config_load(kTable1.c_str(), &cfg.p), DKL_OK) << dkl_last_error();
    char *text = nullptr;
    ASSERT_EQ(dkl_config_serialize(cfg.p, &text), DKL_OK);
    std::string serialized = take(text);
    Config again;
    ASSERT_EQ(dkl_config_parse(serialized.c_str(), &again.p), DKL_OK);
    ASSERT_EQ(dkl_config_serialize(again.p, &text), DKL_OK);
    EXPECT_EQ(take(text), serialized);

    char *csv = nullptr;
    int code = -1;
    ASSERT_EQ(dkl_run(cfg.p, nullptr, &csv, &code), DKL_OK);
    EXPECT_EQ(code, 0);
    EXPECT_NE(take(csv).find("T_s,P_e,sd\n"), std::string::npos);

    dkl_run_overrides ov{};
    ov.sweep_phis = -1;
    ov.clock_during_pulses = -1;
    ov.protocol = "teleport";
    ASSERT_EQ(dkl_run(cfg.p, &ov, &csv, &code), DKL_OK);
    EXPECT_EQ(code, 2);
    EXPECT_EQ(csv, nullptr);
    EXPECT_NE(std::string(dkl_last_error()).find("teleport"), std::string::npos);

    ov.protocol = "ramsey";
    ov.grid = "0:10ms:1ms";
    ov.has_seed = 1;
    ov.seed = 3;
    ASSERT_EQ(dkl_run(cfg.p, &ov, &csv, &code), DKL_OK);
    EXPECT_EQ(code, 0);
    std::string out = take(csv);
    EXPECT_NE(out.find("# protocol=ramsey"), std::string::npos);

    Config broken;
    EXPECT_EQ(dkl_config_parse("pulse a field=X tau_s=1 phase_rad=0\nprotocol ramsey\n", &broken.p),
              DKL_ERR_CONFIG_REFERENCE);
    EXPECT_EQ(broken.p, nullptr);
    EXPECT_EQ(dkl_config_parse("", &broken.p), DKL_ERR_CONFIG_MISSING);
    EXPECT_EQ(dkl_config_load("/nonexistent/dklock.cfg", &broken.p), DKL_ERR_IO);
}
