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

#ifndef DKLOCK_CORE_CONFIG_HPP
#define DKLOCK_CORE_CONFIG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "core/error.hpp"
#include "core/protocol.hpp"
#include "core/stochastic.hpp"

namespace dklock {

enum class Protocol { ramsey, scramble, retrieve, double_scramble, double_retrieve, attack, fit };

const char *protocol_name(Protocol p);
std::optional<Protocol> protocol_from_name(std::string_view name);

/// Syntax errors carry the 1-based line and column they were found at. Line 0
/// marks text that did not come from a file, such as a command-line grid.
class ConfigError : public Error {
   public:
    ConfigError(ErrorCode code, int line, int column, const std::string &message);

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }
    /// The message without its position prefix.
    const std::string &detail() const noexcept { return detail_; }

   private:
    int line_;
    int column_;
    std::string detail_;
};

/// Frequencies are kept in Hz as written; `params()` converts to rad/s.
struct FieldDef {
    std::string label;
    double rabi_hz = 0.0;
    double detuning_hz = 0.0;

    FieldParams params() const { return FieldParams::from_hz(label, rabi_hz, detuning_hz); }

    bool operator==(const FieldDef &) const = default;
};

struct PulseDef {
    std::string name;
    std::string field;
    double tau = 0.0;
    /// Empty means "random".
    std::optional<double> phase;

    bool operator==(const PulseDef &) const = default;
};

struct GridDef {
    double start = 0.0;
    double stop = 0.0;
    double step = 0.0;

    std::vector<double> values() const { return make_grid(start, stop, step); }

    bool operator==(const GridDef &) const = default;
};

struct NoiseDef {
    double linewidth_hz = 1000.0;
    int64_t atoms = 50'000;
    int64_t repeats = 5;
    uint64_t seed = 0;
    double elapsed = 47.0;
    double contrast_write = 30.0 / 565.0;
    double contrast_scramble = 100.0 / 169.0;

    NoiseModel model() const;

    bool operator==(const NoiseDef &) const = default;
};

struct ExperimentConfig {
    FrameMode frame_mode = FrameMode::rotating;
    double atomic_frequency_hz = 0.0;
    bool clock_during_pulses = false;
    std::vector<FieldDef> fields;
    std::vector<PulseDef> pulses;
    std::optional<Protocol> protocol;
    std::map<std::string, double> intervals;
    std::optional<GridDef> grid;
    /// Absent means noiseless.
    std::optional<NoiseDef> noise;
    int64_t sweep_phis = 0;

    const FieldDef *find_field(std::string_view label) const;
    const PulseDef *find_pulse(std::string_view name) const;
    std::optional<double> interval(std::string_view name) const;
    SequenceOptions sequence_options() const;

    bool operator==(const ExperimentConfig &) const = default;
};

/// Line-oriented grammar, one statement per line, '#' starts a comment:
///
///   frame rotating | frame lab <omega_a_Hz>
///   clock_during_pulses on|off
///   field <label> rabi_hz=<f> detuning_hz=<f>
///   pulse <name> field=<label> tau_s=<t> phase_rad=<f>|random
///   protocol ramsey|scramble|retrieve|double-scramble|double-retrieve|attack|fit
///   interval T1=<t> T2=<t> T3=<t> T4=<t>
///   grid <start>:<stop>:<step>
///   noise linewidth_hz=<f> atoms=<n> repeats=<n> seed=<n> elapsed_s=<t>
///         contrast_write_s=<t> contrast_scramble_s=<t>
///   sweep phis=<n>
///
/// Times <t> accept the suffixes s, ms and us.
ExperimentConfig parse_config(std::string_view text);

ExperimentConfig load_config(const std::string &path);

/// Text that parse_config maps back to an identical config.
std::string serialize_config(const ExperimentConfig &config);

/// "<start>:<stop>:<step>" with optional time suffixes.
GridDef parse_grid(std::string_view text);

/// Shortest round-trip decimal form, independent of the C locale.
std::string format_number(double value);

}  // namespace dklock

#endif
