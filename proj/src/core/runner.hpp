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

#ifndef DKLOCK_CORE_RUNNER_HPP
#define DKLOCK_CORE_RUNNER_HPP

#include <optional>
#include <string>

#include "core/analysis.hpp"
#include "core/config.hpp"

namespace dklock {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitConfig = 2,
    kExitInfeasible = 3,
    kExitFitNotConverged = 4,
};

/// Command-line values that take precedence over the config file.
struct RunOverrides {
    std::optional<Protocol> protocol;
    std::optional<GridDef> grid;
    std::optional<uint64_t> seed;
    std::optional<int64_t> sweep_phis;
    std::optional<bool> clock_during_pulses;
    /// Scan CSV fitted by the `fit` protocol instead of a simulated scan.
    std::optional<std::string> input_csv;
};

struct RunResult {
    int exit_code = kExitOk;
    std::string csv;
    std::string message;
};

/// Exit code for a core error.
int exit_code_for(ErrorCode code);

/// Executes the configured protocol. Never throws; failures come back as an
/// exit code and a message. Output is deterministic for a fixed seed.
///
/// Scans print `T_s,P_e,sd`; phase sweeps print
/// `phi_S,amplitude,frequency_Hz,phase_rad,offset,decay_s,residual`; the
/// `fit` protocol prints the same minus phi_S. Lines starting with '#' ahead
/// of the header carry run metadata (protocol, clock flag, planned timings).
RunResult run(const ExperimentConfig &config, const RunOverrides &overrides = {});

/// Reads `T_s,P_e,sd` CSV text ('#' lines and the header are skipped).
FringeScan parse_scan_csv(std::string_view text);

std::string scan_to_csv(const FringeScan &scan);

}  // namespace dklock

#endif
