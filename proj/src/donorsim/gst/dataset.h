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

#ifndef DONORSIM_GST_DATASET_H
#define DONORSIM_GST_DATASET_H

#include <cstdint>
#include <string>
#include <vector>

#include "donorsim/gst/design.h"

namespace donorsim::gst {

/// Outcome counts per circuit.
struct DataSet {
    int num_outcomes = 2;
    std::vector<GateString> circuits;
    std::vector<std::vector<int64_t>> counts;

    int64_t total(size_t index) const;
    /// Index of a circuit, or -1.
    int find(const GateString &circuit) const;
};

/// Multinomial draws from the truth's Born probabilities (clipped to [0, 1] and
/// renormalized) at `shots` per circuit.
DataSet simulate_counts(const GateSet &truth, const GSTDesign &design, int64_t shots, uint64_t seed);

/// Line-oriented text: a header "# donorsim-gst-dataset outcomes=<m>", then
/// "<circuit> <n_0> ... <n_{m-1}>" per circuit.
std::string write_dataset(const DataSet &data);
/// Throws std::invalid_argument on malformed input.
DataSet read_dataset(const std::string &text);

}  // namespace donorsim::gst

#endif
