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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "dklock/dklock.h"

namespace {

constexpr int kExitConfig = 2;

struct OwnedString {
    char *s = nullptr;
    ~OwnedString() { dkl_string_free(s); }
};

struct OwnedConfig {
    dkl_config *c = nullptr;
    ~OwnedConfig() { dkl_config_destroy(c); }
};

int report(dkl_status status) {
    std::cerr << "dklock: " << dkl_status_string(status) << ": " << dkl_last_error() << "\n";
    switch (status) {
        case DKL_ERR_INFEASIBLE:
            return 3;
        case DKL_ERR_FIT:
            return 4;
        case DKL_ERR_CONFIG_SYNTAX:
        case DKL_ERR_CONFIG_REFERENCE:
        case DKL_ERR_CONFIG_MISSING:
        case DKL_ERR_IO:
            return kExitConfig;
        default:
            return 1;
    }
}

bool emit(const char *text, const std::string &output) {
    if (output.empty() || output == "-") {
        std::fputs(text, stdout);
        return std::fflush(stdout) == 0;
    }
    std::ofstream out(output, std::ios::binary);
    out << text;
    return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Double-key-lock Ramsey memory simulator"};
    app.set_version_flag("--version", std::string(dkl_version()));
    app.require_subcommand(1);

    std::string config_path;
    std::string output;
    std::optional<std::string> protocol;
    std::optional<std::string> grid;
    std::optional<uint64_t> seed;
    std::optional<int64_t> sweep_phis;
    std::optional<std::string> clock;
    std::optional<std::string> input_csv;

    auto *run = app.add_subcommand("run", "Run the configured protocol and print CSV");
    run->add_option("config", config_path, "Experiment description file")->required();
    run->add_option("--protocol", protocol, "ramsey|scramble|retrieve|double-scramble|double-retrieve|attack|fit");
    run->add_option("--grid", grid, "Scan grid start:stop:step (s, ms or us)");
    run->add_option("--seed", seed, "Noise seed");
    run->add_option("--sweep-phis", sweep_phis, "Number of scramble phases to sweep")->check(CLI::NonNegativeNumber);
    run->add_option("--clock-during-pulses", clock, "on|off")
        ->expected(0, 1)
        ->default_str("on")
        ->check(CLI::IsMember({"on", "off"}));
    run->add_option("--input", input_csv, "Scan CSV to fit (protocol fit)");
    run->add_option("--output,-o", output, "Write CSV here instead of standard output");

    std::string check_path;
    auto *check = app.add_subcommand("check", "Parse a config and print its normalized form");
    check->add_option("config", check_path, "Experiment description file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    OwnedConfig config;
    const std::string &path = *check ? check_path : config_path;
    if (dkl_status s = dkl_config_load(path.c_str(), &config.c); s != DKL_OK) {
        return report(s);
    }

    if (*check) {
        OwnedString text;
        if (dkl_status s = dkl_config_serialize(config.c, &text.s); s != DKL_OK) {
            return report(s);
        }
        return emit(text.s, "") ? 0 : 1;
    }

    dkl_run_overrides ov{};
    ov.protocol = protocol ? protocol->c_str() : nullptr;
    ov.grid = grid ? grid->c_str() : nullptr;
    ov.has_seed = seed ? 1 : 0;
    ov.seed = seed.value_or(0);
    ov.sweep_phis = sweep_phis.value_or(-1);
    ov.clock_during_pulses = -1;
    if (run->count("--clock-during-pulses") > 0) {
        ov.clock_during_pulses = clock.value_or("on") == "off" ? 0 : 1;
    }
    ov.input_csv = input_csv ? input_csv->c_str() : nullptr;

    OwnedString csv;
    int exit_code = 0;
    if (dkl_status s = dkl_run(config.c, &ov, &csv.s, &exit_code); s != DKL_OK) {
        return report(s);
    }
    if (exit_code != 0 && dkl_last_error()[0] != '\0') {
        std::cerr << "dklock: " << dkl_last_error() << "\n";
    }
    if (csv.s != nullptr && csv.s[0] != '\0' && !emit(csv.s, output)) {
        std::cerr << "dklock: cannot write " << output << "\n";
        return 1;
    }
    return exit_code;
}
