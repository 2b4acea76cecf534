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

#include "donorsim/gst/suite.h"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "donorsim/gst/dataset.h"
#include "donorsim/gst/design.h"

namespace donorsim::gst {

std::string suite_mode_name(SuiteMode mode) {
    switch (mode) {
        case SuiteMode::Uncond1q:
            return "uncond-1q";
        case SuiteMode::Cond1q:
            return "cond-1q";
        default:
            return "2q";
    }
}

SuiteMode parse_suite_mode(const std::string &name) {
    for (SuiteMode m : {SuiteMode::Uncond1q, SuiteMode::Cond1q, SuiteMode::TwoQubit}) {
        if (suite_mode_name(m) == name) return m;
    }
    throw std::invalid_argument("unknown GST suite mode '" + name + "'");
}

bool SuiteReport::converged() const {
    return std::all_of(runs.begin(), runs.end(), [](const SuiteRun &r) { return r.estimate.converged; });
}

double SuiteReport::min_fidelity(const std::vector<std::string> &labels) const {
    double out = std::numeric_limits<double>::infinity();
    for (const auto &r : runs)
        for (const auto &l : labels) out = std::min(out, r.budget.at(l).fidelity);
    return out;
}

double SuiteReport::max_fidelity(const std::vector<std::string> &labels) const {
    double out = -std::numeric_limits<double>::infinity();
    for (const auto &r : runs)
        for (const auto &l : labels) out = std::max(out, r.budget.at(l).fidelity);
    return out;
}

namespace {

SuiteRun run_one(const std::string &name, const GateSet &truth, const GateSet &target, const GSTDesign &design,
                 const SuiteOptions &options, uint64_t seed) {
    SuiteRun run;
    run.name = name;
    run.truth = truth;
    run.num_circuits = design.circuits.size();
    const DataSet data = simulate_counts(truth, design, options.shots, seed);
    run.estimate = estimate(data, design, target, options.estimate);
    GaugeOptions gauge;
    gauge.group = options.gauge;
    run.gauged = gauge_optimize(run.estimate.gateset, target, gauge).gateset;
    run.budget = error_budget(run.gauged, target);
    run.truth_budget = error_budget(truth, target);
    return run;
}

std::string qubit_name(Qubit q) { return q == Qubit::Q1 ? "Q1" : "Q2"; }

}  // namespace

SuiteReport run_device_suite(SuiteMode mode, const DeviceModel &device, const SuiteOptions &options, uint64_t seed) {
    if (options.shots < 1) {
        throw std::invalid_argument("shots must be positive");
    }
    device.validate();
    SuiteReport report;
    report.mode = mode;
    uint64_t k = 0;
    auto next_seed = [&]() { return splitmix64(seed + 0x9e3779b97f4a7c15ULL * ++k); };
    if (mode == SuiteMode::TwoQubit) {
        const GSTDesign design = options.max_lengths.empty() ? default_design_2q() : default_design_2q(options.max_lengths);
        const uint64_t s = next_seed();
        report.runs.push_back(run_one("two-qubit", device_gateset_2q(device, s), target_2q(), design, options, s));
        return report;
    }
    const GSTDesign design = options.max_lengths.empty() ? default_design_1q() : default_design_1q(options.max_lengths);
    const GateSet target = target_1q();
    for (Qubit q : {Qubit::Q1, Qubit::Q2}) {
        const std::string other_name = qubit_name(other(q));
        if (mode == SuiteMode::Cond1q) {
            for (ControlCondition c : {ControlCondition::Down, ControlCondition::Up}) {
                const uint64_t s = next_seed();
                const std::string name =
                    qubit_name(q) + "|" + other_name + "=" + (c == ControlCondition::Down ? "down" : "up");
                report.runs.push_back(run_one(name, device_gateset_cond(device, q, c, s), target, design, options, s));
            }
        } else {
            for (Spectator sp : {Spectator::Down, Spectator::Plus, Spectator::Up}) {
                const uint64_t s = next_seed();
                const std::string name = qubit_name(q) + "|spectator=" + spectator_name(sp);
                report.runs.push_back(
                    run_one(name, device_gateset_uncond(device, q, sp, s), target, design, options, s));
            }
        }
    }
    return report;
}

}  // namespace donorsim::gst
