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

#ifndef DONORSIM_READOUT_H
#define DONORSIM_READOUT_H

#include <limits>
#include <string>
#include <variant>

#include "donorsim/linalg.h"
#include "donorsim/pulse_engine.h"
#include "donorsim/rng.h"

namespace donorsim {

enum class Spin { Down = 0, Up = 1 };

enum class CombineRule { Majority, Threshold };

/// Single-shot electron readout via spin-dependent tunnelling, plus the repetition
/// settings for quantum non-demolition readout of Q2 through Q1.
struct ReadoutModel {
    double p_up_given_up = 0.74;
    double p_up_given_down = 0.26;
    int n_qnd = 11;
    double t1_s = std::numeric_limits<double>::infinity();
    /// Duration of one load / CROT / measure cycle, used for T1 decay of Q2.
    double cycle_time_s = 1e-3;
    CombineRule rule = CombineRule::Majority;
    /// Minimum number of "up" cycles for an "up" verdict when rule == Threshold.
    int threshold = 0;

    double contrast() const { return p_up_given_up - p_up_given_down; }
    /// Up-count needed for an "up" verdict; majority means strictly more than n/2.
    int up_threshold() const;
    void validate() const;

    static ReadoutModel perfect();
};

/// Reported-outcome confusion of a readout: P(report up | true up / true down).
struct Confusion {
    double p_up_given_up = 1.0;
    double p_up_given_down = 0.0;

    double contrast() const { return p_up_given_up - p_up_given_down; }
};

/// Measures one electron: samples the true spin by the Born rule, projects `rho`
/// onto it, and reports it through the conditional readout probabilities.
Spin measure_electron(DensityMatrix &rho, Qubit qubit, const ReadoutModel &model, Rng &rng);

/// Repetitive QND readout of `target` through the other electron: each cycle loads the
/// ancilla in |down>, flips it conditional on the target being up, and measures it.
/// Cycle verdicts are combined by the model's rule. T1 decay of the target is applied
/// once per cycle.
Spin qnd_readout(DensityMatrix &rho, const ReadoutModel &model, Rng &rng, Qubit target = Qubit::Q2);

/// Combined confusion of QND readout, including per-cycle T1 decay of the target.
Confusion qnd_confusion(const ReadoutModel &model);
/// Confusion of a single direct readout.
Confusion direct_confusion(const ReadoutModel &model);

/// Preparation targets: product states "dd", "du", "ud", "uu" (Q1 first),
/// Bell states "phi+", "phi-", "psi+", "psi-", or an explicit amplitude vector.
using StateSpec = std::variant<std::string, CVector>;

/// Pure target state with independent bit-flip preparation errors of probability
/// `prep_error` on each electron. Throws std::invalid_argument for unknown names or
/// unnormalizable vectors.
DensityMatrix initialize(const StateSpec &spec, double prep_error = 0.0);

}  // namespace donorsim

#endif
