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

#include "donorsim/rng.h"

#include <algorithm>
#include <stdexcept>

namespace donorsim {

uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

Rng make_stream(uint64_t seed, uint64_t a, uint64_t b) {
    uint64_t s = splitmix64(seed);
    s = splitmix64(s ^ splitmix64(a + 0x632BE59BD9B4E019ULL));
    s = splitmix64(s ^ splitmix64(b + 0x8CB92BA72F3D8DD7ULL));
    std::seed_seq seq{static_cast<uint32_t>(s), static_cast<uint32_t>(s >> 32)};
    return Rng(seq);
}

std::vector<int64_t> sample_multinomial(Rng &rng, int64_t n, const std::vector<double> &probs) {
    if (n < 0) {
        throw std::invalid_argument("negative trial count");
    }
    std::vector<int64_t> counts(probs.size(), 0);
    double remaining_p = 1.0;
    int64_t remaining_n = n;
    for (size_t k = 0; k < probs.size(); ++k) {
        if (remaining_n == 0) {
            break;
        }
        if (k + 1 == probs.size()) {
            counts[k] = remaining_n;
            break;
        }
        double p = std::clamp(probs[k], 0.0, 1.0);
        double q = remaining_p > 0.0 ? std::clamp(p / remaining_p, 0.0, 1.0) : 0.0;
        std::binomial_distribution<int64_t> dist(remaining_n, q);
        counts[k] = dist(rng);
        remaining_n -= counts[k];
        remaining_p -= p;
    }
    return counts;
}

}  // namespace donorsim
