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

#ifndef DKLOCK_CORE_PROTOCOL_HPP
#define DKLOCK_CORE_PROTOCOL_HPP

#include <optional>
#include <span>

#include "core/random.hpp"
#include "core/sequence.hpp"

namespace dklock {

struct SequenceOptions {
    FrameConvention frame;
    bool clock_during_pulses = false;
};

/// The write pulse: first key of the lock.
struct WriteKey {
    FieldParams field;
    double tau = 0.0;
    double phase = 0.0;

    /// Key whose pulse area rabi * tau equals `area`.
    static WriteKey with_area(FieldParams field, double area = std::numbers::pi / 2, double phase = 0.0);

    double pulse_area() const { return field.rabi * tau; }
};

/// A scramble pulse: second key of the lock. `lead` is the interval from the
/// preceding pulse (T1 for a single scramble, T2 for scramble-2).
struct ScrambleKey {
    FieldParams field;
    double tau = 0.0;
    double phi_s = 0.0;
    double lead = 0.0;

    /// Key with phi_s reduced to [0, 2pi).
    static ScrambleKey make(FieldParams field, double tau, double phi_s, double lead);
};

/// Scramble-to-retrieve interval T2 = (2n+1) pi / |delta_S|.
struct RetrievalPlan {
    int64_t n = 0;
    double T2 = 0.0;
    double detuning = 0.0;
};

/// Timings for the double scramble: T3 = (2n+1) pi/|delta_S2| and
/// T2 + T3 + T4 (+ 2 tau_S2 with the pulse clock on) = (2m+1) pi/|delta_S1|.
struct DoubleRetrievalPlan {
    int64_t m = 0;
    int64_t n = 0;
    double T2 = 0.0;
    double T3 = 0.0;
    double T4 = 0.0;
    double tau_s2 = 0.0;
    bool clock_during_pulses = false;
    double detuning_s1 = 0.0;
    double detuning_s2 = 0.0;
};

inline constexpr int64_t kMaxPlannerIndex = 1'000'000;

/// [W, Wait(T), W]. The final wait is the scan variable in every builder.
Sequence build_write_read(const WriteKey &key, double T, const SequenceOptions &opts = {});

/// Write-read with an extra fixed wait `lead` in front of the scanned one:
/// the unscrambled reference for a memory whose readout starts `lead` later.
Sequence build_reference(const WriteKey &key, double lead, double T, const SequenceOptions &opts = {});

/// Interval after the write pulse at which the read pulse should fire:
/// (2k+1) pi / |delta_W|.
double plan_readout(double delta_w, int64_t k);

Sequence build_scrambled(const WriteKey &w, const ScrambleKey &s, double T, const SequenceOptions &opts = {});

/// Smallest n whose T2 reaches min_T2.
RetrievalPlan plan_retrieval(double delta_s, double min_t2);

Sequence build_retrieved(const WriteKey &w, const ScrambleKey &s, const RetrievalPlan &plan, double T,
                         const SequenceOptions &opts = {});

/// The interval scramble-1 -> scramble-2 is taken from s2.lead.
Sequence build_double_scrambled(const WriteKey &w, const ScrambleKey &s1, const ScrambleKey &s2, double T,
                                const SequenceOptions &opts = {});

/// Smallest n, then smallest m (<= kMaxPlannerIndex) meeting the minimum
/// intervals. The slack left for T2 + T4 is split evenly unless `t2_override`
/// fixes T2.
DoubleRetrievalPlan plan_double_retrieval(double delta_s1, double delta_s2, double tau_s2, double min_t3,
                                          double min_t2_plus_t4, bool clock_during_pulses,
                                          std::optional<double> t2_override = std::nullopt);

/// [W, T1, S1, T2, S2, T3, S2, T4, S1, T, W]. Intervals T2..T4 come from the
/// plan; s2.lead is not used.
Sequence build_double_retrieved(const WriteKey &w, const ScrambleKey &s1, const ScrambleKey &s2,
                                const DoubleRetrievalPlan &plan, double T, const SequenceOptions &opts = {});

enum class Cooperation { with_scramble_key, without_scramble_key };

/// Reads a memory written with `w` and scrambled with `lock`. With the
/// scramble key the retrieve pulse is applied at the planned T2; without it
/// the reader faces a fresh random phi_S on every shot (grid point) and no
/// retrieve pulse.
FringeScan secret_readout(const WriteKey &w, const ScrambleKey &lock, Cooperation who, std::span<const double> grid,
                          Rng &rng, const SequenceOptions &opts = {});

}  // namespace dklock

#endif
