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

#include "core/config.hpp"

#include <gtest/gtest.h>

#include <clocale>
#include <cstdio>
#include <fstream>
#include <random>

#include "core/analysis.hpp"
#include "core/runner.hpp"

using namespace dklock;

namespace {

const std::string kTable1 = std::string(DKLOCK_SOURCE_DIR) + "/configs/table1.cfg";

ExperimentConfig table1() { return load_config(kTable1); }

ConfigError config_error(std::string_view text) {
    try {
        parse_config(text);
    } catch (const ConfigError &e) {
        return e;
    }
    ADD_FAILURE() << "no error raised for:\n" << text;
    return ConfigError(ErrorCode::io, 0, 0, "");
}

// Parses the body of a T_s,P_e,sd or sweep CSV, skipping '#' lines and the header.
std::vector<std::vector<double>> csv_rows(const std::string &csv) {
    std::vector<std::vector<double>> rows;
    size_t pos = 0;
    bool header = true;
    while (pos < csv.size()) {
        size_t end = csv.find('\n', pos);
        std::string line = csv.substr(pos, end - pos);
        pos = end + 1;
        if (line.empty() || line[0] == '#') {
            continue;
        }
        if (header) {
            header = false;
            continue;
        }
        std::vector<double> row;
        size_t a = 0;
        while (a <= line.size()) {
            size_t b = line.find(',', a);
            if (b == std::string::npos) {
                b = line.size();
            }
            row.push_back(std::stod(line.substr(a, b - a)));
            a = b + 1;
        }
        rows.push_back(row);
    }
    return rows;
}

FringeScan rows_to_scan(const std::vector<std::vector<double>> &rows) {
    FringeScan s;
    for (const auto &r : rows) {
        s.points.push_back({r[0], r[1], r[2]});
    }
    return s;
}

ExperimentConfig random_config(std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> u(0, 1);
    auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<uint64_t>(n)); };
    ExperimentConfig c;
    if (pick(2) == 1) {
        c.frame_mode = FrameMode::lab;
        c.atomic_frequency_hz = 1e4 * u(rng);
    }
    c.clock_during_pulses = pick(2) == 1;
    int nf = 1 + pick(3);
    for (int k = 0; k < nf; k++) {
        c.fields.push_back({"F" + std::to_string(k), 1 + 1000 * u(rng), 600 * u(rng) - 300});
    }
    int np = 1 + pick(4);
    for (int k = 0; k < np; k++) {
        PulseDef p{"p" + std::to_string(k), c.fields[static_cast<size_t>(pick(nf))].label, 1e-6 + 1e-2 * u(rng),
                   std::nullopt};
        if (pick(3) != 0) {
            p.phase = 2 * 3.14159 * u(rng);
        }
        c.pulses.push_back(p);
    }
    c.protocol = static_cast<Protocol>(pick(7));
    for (const char *name : {"T1", "T2", "T3", "T4"}) {
        if (pick(2) == 1) {
            c.intervals[name] = 1e-2 * u(rng);
        }
    }
    if (pick(3) != 0) {
        double start = 1e-3 * u(rng);
        c.grid = GridDef{start, start + 2e-2 * u(rng), 1e-5 + 1e-4 * u(rng)};
    }
    if (pick(2) == 1) {
        NoiseDef n;
        n.linewidth_hz = 2000 * u(rng);
        n.atoms = static_cast<int64_t>(rng() % 100000);
        n.repeats = 1 + static_cast<int64_t>(rng() % 9);
        n.seed = rng();
        n.elapsed = 100 * u(rng);
        n.contrast_write = 1e-3 + u(rng);
        n.contrast_scramble = 1e-3 + u(rng);
        c.noise = n;
    }
    c.sweep_phis = pick(2) == 1 ? 2 + pick(100) : 0;
    return c;
}

}  // namespace

TEST(config, table1_file) {
    auto c = table1();
    ASSERT_NE(c.find_field("W"), nullptr);
    EXPECT_DOUBLE_EQ(c.find_field("W")->params().rabi, 2 * std::numbers::pi * 565);
    EXPECT_DOUBLE_EQ(c.find_field("W")->params().detuning, 2 * std::numbers::pi * 110);
    EXPECT_DOUBLE_EQ(c.find_field("S")->params().rabi, 2 * std::numbers::pi * 169);
    EXPECT_DOUBLE_EQ(c.find_field("S")->params().detuning, 2 * std::numbers::pi * 100);
    EXPECT_DOUBLE_EQ(c.find_pulse("write")->tau, 0.44e-3);
    EXPECT_DOUBLE_EQ(c.find_pulse("scramble")->tau, 1.48e-3);
    EXPECT_FALSE(c.find_pulse("scramble")->phase.has_value());
    EXPECT_DOUBLE_EQ(*c.interval("T1"), 5e-3);
    EXPECT_DOUBLE_EQ(*c.interval("T2"), 5e-3);
    EXPECT_EQ(c.protocol, Protocol::retrieve);
    EXPECT_EQ(c.grid->values().size(), 201u);
    EXPECT_FALSE(c.noise.has_value());
}

TEST(config, errors) {
    auto e = config_error("");
    EXPECT_EQ(e.code(), ErrorCode::config_missing);

    e = config_error("field W rabi_hz=1 detuning_hz=0\npulse a field=X tau_s=1ms phase_rad=0\nprotocol ramsey\n");
    EXPECT_EQ(e.code(), ErrorCode::config_reference);
    EXPECT_EQ(e.line(), 2);
    EXPECT_NE(std::string(e.what()).find("'X'"), std::string::npos);

    e = config_error("protocol ramsey\nfield W rabi_hz=1 detuning_hz=0 colour=red\n");
    EXPECT_EQ(e.code(), ErrorCode::config_syntax);
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(e.column(), 33);

    e = config_error("# comment\n\nbogus 1\n");
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.column(), 1);

    e = config_error("protocol ramsey\ngrid 0:1ms:0\n");
    EXPECT_EQ(e.line(), 2);
    EXPECT_EQ(std::string(e.what()).find("line 1"), std::string::npos);

    e = config_error("protocol ramsey\ngrid 0:1ms:1us\ngrid 0:1ms:1us\n");
    EXPECT_EQ(e.line(), 3);

    e = config_error("protocol ramsey\nfield W rabi_hz=abc detuning_hz=0\n");
    EXPECT_EQ(e.column(), 17);

    EXPECT_EQ(config_error("protocol teleport\n").code(), ErrorCode::config_syntax);
    EXPECT_EQ(config_error("protocol ramsey\nnoise repeats=0\n").code(), ErrorCode::config_syntax);
}

TEST(config, units_and_comments) {
    auto c = parse_config(
        "protocol ramsey   # trailing comment\n"
        "frame lab 10000\n"
        "interval T1=250us T2=3ms T3=0.5s T4=2e-3\n"
        "grid 1ms:2ms:100us\n");
    EXPECT_EQ(c.frame_mode, FrameMode::lab);
    EXPECT_DOUBLE_EQ(c.sequence_options().frame.atomic_frequency, 2 * std::numbers::pi * 1e4);
    EXPECT_DOUBLE_EQ(*c.interval("T1"), 250e-6);
    EXPECT_DOUBLE_EQ(*c.interval("T2"), 3e-3);
    EXPECT_DOUBLE_EQ(*c.interval("T3"), 0.5);
    EXPECT_DOUBLE_EQ(*c.interval("T4"), 2e-3);
    EXPECT_EQ(c.grid->values().size(), 11u);
}

TEST(config, round_trip) {
    std::mt19937_64 rng(77);
    for (int k = 0; k < 500; k++) {
        auto c = random_config(rng);
        auto text = serialize_config(c);
        auto back = parse_config(text);
        ASSERT_EQ(back, c) << text;
        EXPECT_EQ(serialize_config(back), text);
    }
    auto t = table1();
    EXPECT_EQ(parse_config(serialize_config(t)), t);
}

TEST(runner, retrieve_fit_frequency) {
    auto r = run(table1());
    ASSERT_EQ(r.exit_code, kExitOk) << r.message;
    auto s = rows_to_scan(csv_rows(r.csv));
    ASSERT_EQ(s.size(), 201u);
    auto fit = fit_damped_sinusoid(s);
    EXPECT_TRUE(fit.converged);
    EXPECT_NEAR(fit.frequency, 110, 1.1);
}

TEST(runner, scramble_sweep_shape) {
    RunOverrides ov;
    ov.protocol = Protocol::scramble;
    ov.sweep_phis = 64;
    auto r = run(table1(), ov);
    ASSERT_EQ(r.exit_code, kExitOk) << r.message;
    EXPECT_NE(r.csv.find("phi_S,amplitude,frequency_Hz,phase_rad,offset,decay_s,residual\n"), std::string::npos);
    EXPECT_NE(r.csv.find("# phase_spread_rad="), std::string::npos);
    auto rows = csv_rows(r.csv);
    ASSERT_EQ(rows.size(), 64u);
    for (const auto &row : rows) {
        EXPECT_EQ(row.size(), 7u);
    }
}

TEST(runner, deterministic_with_seed) {
    auto c = parse_config(
        "field W rabi_hz=565 detuning_hz=110\n"
        "pulse write field=W tau_s=0.44ms phase_rad=0\n"
        "protocol ramsey\n"
        "noise linewidth_hz=1000 atoms=50000 repeats=5 seed=1\n");
    RunOverrides ov;
    ov.grid = parse_grid("0:20ms:0.1ms");
    ov.seed = 7;
    auto a = run(c, ov);
    auto b = run(c, ov);
    ASSERT_EQ(a.exit_code, kExitOk) << a.message;
    EXPECT_EQ(a.csv, b.csv);
    EXPECT_NE(a.csv.find("# seed=7"), std::string::npos);
    ov.seed = 8;
    EXPECT_NE(run(c, ov).csv, a.csv);
}

TEST(runner, every_protocol_runs) {
    auto c = table1();
    for (Protocol p : {Protocol::ramsey, Protocol::scramble, Protocol::retrieve, Protocol::double_scramble,
                       Protocol::double_retrieve, Protocol::attack, Protocol::fit}) {
        RunOverrides ov;
        ov.protocol = p;
        auto r = run(c, ov);
        EXPECT_EQ(r.exit_code, kExitOk) << protocol_name(p) << ": " << r.message;
        EXPECT_NE(r.csv.find(std::string("# protocol=") + protocol_name(p)), std::string::npos);
    }
}

TEST(runner, exit_codes) {
    auto c = table1();
    RunOverrides ov;
    ov.protocol = Protocol::ramsey;
    ov.sweep_phis = 8;
    EXPECT_EQ(run(c, ov).exit_code, kExitConfig);

    auto missing = c;
    missing.protocol.reset();
    EXPECT_EQ(run(missing).exit_code, kExitConfig);

    auto far = c;
    far.protocol = Protocol::double_retrieve;
    far.intervals["T2"] = 1e5;
    EXPECT_EQ(run(far).exit_code, kExitInfeasible);

    std::string path = testing::TempDir() + "flat_scan.csv";
    {
        std::ofstream out(path);
        out << "T_s,P_e,sd\n";
        for (int k = 0; k < 20; k++) {
            out << k * 1e-3 << ",0.5,0\n";
        }
    }
    RunOverrides fit;
    fit.protocol = Protocol::fit;
    fit.input_csv = path;
    auto r = run(c, fit);
    EXPECT_EQ(r.exit_code, kExitFitNotConverged);
    EXPECT_NE(r.csv.find("# converged=no"), std::string::npos);
    std::remove(path.c_str());

    fit.input_csv = testing::TempDir() + "does_not_exist.csv";
    EXPECT_EQ(run(c, fit).exit_code, kExitFailure);
}

TEST(runner, fit_reads_scan_csv) {
    auto clean = run(table1());
    std::string path = testing::TempDir() + "retrieved_scan.csv";
    {
        std::ofstream out(path);
        out << clean.csv;
    }
    RunOverrides fit;
    fit.protocol = Protocol::fit;
    fit.input_csv = path;
    auto r = run(table1(), fit);
    ASSERT_EQ(r.exit_code, kExitOk) << r.message;
    auto rows = csv_rows(r.csv);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_NEAR(rows[0][1], 110, 1.1);
    std::remove(path.c_str());
}

TEST(runner, scan_csv_round_trip) {
    FringeScan s;
    s.points = {{0, 0.25, 0.01}, {1e-4, 1.0 / 3, 0}, {2.5e-4, 0.9999999999999999, 1e-17}};
    auto text = scan_to_csv(s);
    EXPECT_EQ(text.rfind("T_s,P_e,sd\n", 0), 0u);
    EXPECT_EQ(parse_scan_csv(text).points, s.points);
}

TEST(runner, csv_ignores_locale) {
    const char *names[] = {"de_DE.UTF-8", "de_DE.utf8", "fr_FR.UTF-8", "fr_FR.utf8"};
    const char *set = nullptr;
    for (const char *n : names) {
        set = std::setlocale(LC_ALL, n);
        if (set != nullptr) {
            break;
        }
    }
    auto r = run(table1());
    std::setlocale(LC_ALL, "C");
    if (set == nullptr) {
        GTEST_SKIP() << "no comma-decimal locale installed";
    }
    EXPECT_EQ(r.csv, run(table1()).csv);
}
