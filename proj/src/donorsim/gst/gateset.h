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

#ifndef DONORSIM_GST_GATESET_H
#define DONORSIM_GST_GATESET_H

#include <map>
#include <string>
#include <vector>

#include "donorsim/linalg.h"

namespace donorsim::gst {

/// Gate labels in time order. The empty circuit is written "{}".
using GateString = std::vector<std::string>;

/// Labels joined with '.', e.g. "Gx.Gy.Gi".
std::string circuit_str(const GateString &circuit);
/// Inverse of circuit_str. Throws std::invalid_argument on malformed input.
GateString parse_circuit(const std::string &text);

/// Gates and SPAM in the Pauli transfer representation (normalized Pauli basis).
/// Effects are stored as vectors e with p = e . v for the state vector v.
struct GateSet {
    int num_qubits = 1;
    std::vector<std::string> labels;
    std::map<std::string, RMatrix> gates;
    RVector rho;
    std::vector<RVector> effects;
    /// Unitaries of ideal gates, kept for target sets.
    std::map<std::string, CMatrix> unitaries;

    int dim() const { return 1 << num_qubits; }
    int ptm_dim() const { return 1 << (2 * num_qubits); }
    int num_outcomes() const { return static_cast<int>(effects.size()); }
    const RMatrix &gate(const std::string &label) const;

    RVector propagate(const GateString &circuit) const;
    /// Born probabilities of every outcome.
    RVector probabilities(const GateString &circuit) const;

    /// Throws std::invalid_argument on inconsistent dimensions or missing labels.
    void validate() const;
};

/// One-qubit set {Gi, Gx, Gy} on Q1 with Q2 held down; prep |down>, outcomes (down, up).
GateSet target_1q();
/// The nine-gate two-qubit set: Gi plus Gx|Gy on each target with each control
/// condition, e.g. Gx1d = X90 on Q1 when Q2 is down. Outcomes dd, du, ud, uu.
GateSet target_2q();
std::vector<std::string> labels_2q();

/// Entanglement fidelity tr(T^-1 G) / d^2.
double entanglement_fidelity(const RMatrix &gate, const RMatrix &target);
/// (d F_ent + 1) / (d + 1). Throws std::invalid_argument if either map is not CP.
double average_gate_fidelity(const RMatrix &gate, const RMatrix &target);

/// Smallest eigenvalue of the normalized Choi matrix.
double choi_min_eigenvalue(const RMatrix &ptm);
bool is_tp(const RMatrix &ptm, double tol);
bool is_cptp(const RMatrix &ptm, double tol);

}  // namespace donorsim::gst

#endif
