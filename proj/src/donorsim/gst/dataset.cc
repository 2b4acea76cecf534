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

#include "donorsim/gst/dataset.h"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "donorsim/rng.h"

namespace donorsim::gst {

int64_t DataSet::total(size_t index) const {
    int64_t t = 0;
    for (auto c : counts.at(index)) t += c;
    return t;
}

int DataSet::find(const GateString &circuit) const {
    auto it = std::find(circuits.begin(), circuits.end(), circuit);
    return it == circuits.end() ? -1 : static_cast<int>(it - circuits.begin());
}

DataSet simulate_counts(const GateSet &truth, const GSTDesign &design, int64_t shots, uint64_t seed) {
    truth.validate();
    if (shots < 1) {
        throw std::invalid_argument("simulate_counts needs shots >= 1");
    }
    DataSet data;
    data.num_outcomes = truth.num_outcomes();
    for (size_t k = 0; k < design.circuits.size(); ++k) {
        RVector p = truth.probabilities(design.circuits[k]);
        std::vector<double> probs(p.size());
        double total = 0.0;
        for (int j = 0; j < p.size(); ++j) {
            probs[j] = std::clamp(p(j), 0.0, 1.0);
            total += probs[j];
        }
        for (auto &x : probs) x /= total;
        Rng rng = make_stream(seed, 0x677374, k);
        data.circuits.push_back(design.circuits[k]);
        data.counts.push_back(sample_multinomial(rng, shots, probs));
    }
    return data;
}

std::string write_dataset(const DataSet &data) {
    std::ostringstream out;
    out << "# donorsim-gst-dataset outcomes=" << data.num_outcomes << "\n";
    for (size_t k = 0; k < data.circuits.size(); ++k) {
        out << circuit_str(data.circuits[k]);
        for (auto c : data.counts[k]) out << ' ' << c;
        out << '\n';
    }
    return out.str();
}

DataSet read_dataset(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    const std::string header = "# donorsim-gst-dataset outcomes=";
    if (!std::getline(in, line) || line.rfind(header, 0) != 0) {
        throw std::invalid_argument("dataset is missing its header line");
    }
    DataSet data;
    data.num_outcomes = std::stoi(line.substr(header.size()));
    if (data.num_outcomes < 2) {
        throw std::invalid_argument("dataset needs at least two outcomes");
    }
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string circuit;
        ls >> circuit;
        std::vector<int64_t> counts;
        int64_t c;
        while (ls >> c) {
            if (c < 0) throw std::invalid_argument("negative count on line " + std::to_string(line_no));
            counts.push_back(c);
        }
        if (!ls.eof() || static_cast<int>(counts.size()) != data.num_outcomes) {
            throw std::invalid_argument("malformed dataset line " + std::to_string(line_no));
        }
        data.circuits.push_back(parse_circuit(circuit));
        data.counts.push_back(std::move(counts));
    }
    return data;
}

}  // namespace donorsim::gst
