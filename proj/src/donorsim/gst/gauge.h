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

#ifndef DONORSIM_GST_GAUGE_H
#define DONORSIM_GST_GAUGE_H

#include "donorsim/gst/gateset.h"

namespace donorsim::gst {

enum class GaugeGroup {
    /// Any invertible transformation.
    Full,
    /// Invertible transformations that preserve trace (first row e_0).
    TP,
    /// Transformations induced by a unitary.
    Unitary,
};

struct GaugeOptions {
    GaugeGroup group = GaugeGroup::TP;
    double spam_weight = 0.1;
    int max_evaluations = 20000;
};

struct GaugeResult {
    GateSet gateset;
    RMatrix transform;
    /// Weighted Frobenius distance to the target after the transformation.
    double distance = 0.0;
    bool converged = true;
};

/// G -> T G T^-1, rho -> T rho, e -> T^-T e.
GateSet apply_gauge(const GateSet &gs, const RMatrix &transform);
double gauge_distance(const GateSet &gs, const GateSet &target, double spam_weight);

/// Minimizes the weighted distance to the target over the chosen group, starting
/// from the linear least-squares solution of T G = G_t T (Full / TP) or the
/// identity (Unitary).
GaugeResult gauge_optimize(const GateSet &estimate, const GateSet &target, const GaugeOptions &options = {});

/// PTM of exp(-i sum_P a_P P / 2).
RMatrix unitary_gauge(const RVector &generator, int num_qubits);

}  // namespace donorsim::gst

#endif
