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

#ifndef DONORSIM_GST_BUDGET_H
#define DONORSIM_GST_BUDGET_H

#include <map>
#include <string>
#include <vector>

#include "donorsim/gst/gateset.h"
#include "donorsim/gst/lindblad.h"

namespace donorsim::gst {

/// Infidelities here are average-gate infidelities. Generator infidelities are
/// first order in the rates: d/(d+1) (sum_P s_P + sum_P h_P^2 / 4).
struct GateBudget {
    std::string label;
    double fidelity = 1.0;
    double infidelity = 0.0;
    double coherent_infidelity = 0.0;
    double incoherent_infidelity = 0.0;
    double generator_fidelity = 1.0;
    /// incoherent / (coherent + incoherent); zero for an error-free gate.
    double incoherent_fraction = 0.0;
    /// Signed Hamiltonian rate along the gate's own rotation generator (for the
    /// idle, the norm of the Z-type part).
    double over_rotation_rad = 0.0;
    /// Norm of the remaining Hamiltonian rates.
    double axis_misalignment_rad = 0.0;
    /// Isotropic part of the stochastic rates as a depolarizing probability.
    double depolarizing_p = 0.0;
    ErrorGenerator generator;
    /// Infidelity contributions: "over-rotation", "axis misalignment",
    /// "depolarization", "dephasing", "control dephasing", "other stochastic".
    std::map<std::string, double> categories;
    bool branch_warning = false;
};

/// Error in the relative angle between the X and Y rotation generators of one
/// conditional configuration.
struct PairMisalignment {
    std::string x_label;
    std::string y_label;
    double angle_error_rad = 0.0;
};

struct ErrorBudget {
    std::vector<GateBudget> gates;
    std::vector<PairMisalignment> pairs;

    const GateBudget &at(const std::string &label) const;
};

/// Requires the target's unitaries. Gates are compared against their targets
/// through the post-gate error generator log(G T^-1).
ErrorBudget error_budget(const GateSet &estimate, const GateSet &target);

/// Pauli coefficients k of K with U = exp(-i sum_P k_P P / 2) (principal branch).
RVector rotation_generator(const CMatrix &unitary);

}  // namespace donorsim::gst

#endif
