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

#ifndef DONORSIM_GST_SUITE_H
#define DONORSIM_GST_SUITE_H

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "donorsim/gst/budget.h"
#include "donorsim/gst/device.h"
#include "donorsim/gst/estimate.h"
#include "donorsim/gst/gauge.h"

namespace donorsim::gst {

enum class SuiteMode { Uncond1q, Cond1q, TwoQubit };

/// "uncond-1q", "cond-1q", "2q".
std::string suite_mode_name(SuiteMode mode);
/// Throws std::invalid_argument for unknown names.
SuiteMode parse_suite_mode(const std::string &name);

struct SuiteOptions {
    int64_t shots = 10000;
    /// Germ-power lengths; the per-size default design when empty.
    std::vector<int> max_lengths;
    EstimateOptions estimate;
    GaugeGroup gauge = GaugeGroup::Unitary;
};

/// One GST experiment of the suite.
struct SuiteRun {
    /// e.g. "Q1|Q2=down" (conditional), "Q2|spectator=plus", "two-qubit".
    std::string name;
    GateSet truth;
    GateSetEstimate estimate;
    GateSet gauged;
    ErrorBudget budget;
    /// Budget of the simulated truth against the same target.
    ErrorBudget truth_budget;
    size_t num_circuits = 0;
};

struct SuiteReport {
    SuiteMode mode = SuiteMode::Cond1q;
    std::vector<SuiteRun> runs;

    bool converged() const;
    /// Smallest and largest estimated fidelity over the given gate labels of every run.
    double min_fidelity(const std::vector<std::string> &labels) const;
    double max_fidelity(const std::vector<std::string> &labels) const;
};

/// uncond-1q: both targets with the spectator down, plus and up; cond-1q: both
/// targets with the control down and up; 2q: the nine-gate set. Each run
/// simulates counts from the device, estimates, gauge-optimizes and budgets.
SuiteReport run_device_suite(SuiteMode mode, const DeviceModel &device, const SuiteOptions &options, uint64_t seed);

}  // namespace donorsim::gst

#endif
