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

#ifndef DKLOCK_CORE_RANDOM_HPP
#define DKLOCK_CORE_RANDOM_HPP

#include <cstdint>
#include <random>

namespace dklock {

using Rng = std::mt19937_64;

/// Independent stream for trial `index` of a run seeded with `seed`.
/// Streams depend only on (seed, index), never on scheduling.
inline Rng trial_stream(uint64_t seed, uint64_t index) {
    // splitmix64 finalizer over the pair.
    uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return Rng(z);
}

}  // namespace dklock

#endif
