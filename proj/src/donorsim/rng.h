// Copyright 2026 The donorsim Authors
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

#ifndef DONORSIM_RNG_H
#define DONORSIM_RNG_H

#include <cstdint>
#include <random>
#include <vector>

namespace donorsim {

using Rng = std::mt19937_64;

/// Deterministic stream for (seed, a, b). Streams for distinct keys are
/// decorrelated through splitmix64 mixing before seeding.
Rng make_stream(uint64_t seed, uint64_t a = 0, uint64_t b = 0);

uint64_t splitmix64(uint64_t x);

/// Multinomial draw by sequential conditional binomials.
std::vector<int64_t> sample_multinomial(Rng &rng, int64_t n, const std::vector<double> &probs);

}  // namespace donorsim

#endif
