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

#ifndef DONORSIM_CHANNELS_H
#define DONORSIM_CHANNELS_H

#include <limits>
#include <vector>

#include "donorsim/linalg.h"

namespace donorsim {

enum class ChannelKind { T1, T2, Depolarizing };

/// Completely positive trace-preserving map in Kraus form.
struct Channel {
    std::vector<CMatrix> kraus;

    int dim() const { return kraus.empty() ? 0 : static_cast<int>(kraus.front().rows()); }
    CMatrix apply(const CMatrix &rho) const;
    RMatrix ptm() const { return ptm_from_kraus(kraus); }
    /// Lifts a single-qubit channel onto qubit `qubit` (1 or 2) of the two-electron space.
    Channel on_qubit(int qubit) const;
};

/// Single-qubit channel over `duration` for a process with the given `rate`
/// (same time units for both):
///   T1           amplitude damping |up> -> |down> with gamma = 1 - exp(-rate t)
///   T2           pure dephasing, coherences scaled by exp(-rate t)
///   Depolarizing (1-p) rho + p I/2 with p = 1 - exp(-rate t)
/// Throws std::invalid_argument for negative rate or duration.
Channel channel(ChannelKind kind, double rate, double duration);

/// (1-p) rho + p I/d on a d-dimensional system (d a power of two).
Channel depolarizing_channel(double p, int dim);

/// rho -> exp(rate S_Z)[rho] on one qubit: dephasing defined by its Lindblad rate.
Channel dephasing_generator_channel(double rate);

/// Channel rates carried by one noise realization. Infinite times mean "off".
struct ChannelRates {
    double t1_s = std::numeric_limits<double>::infinity();
    double t2_us = std::numeric_limits<double>::infinity();
    /// Two-qubit depolarizing probability applied after every drive gate.
    double depolarizing_per_gate = 0.0;
    /// Two-qubit depolarizing probability applied after every idle gate.
    double idle_depolarizing = 0.0;
};

/// Per-shot noise sample: quasi-static frequency offsets (MHz) plus channel rates.
struct NoiseRealization {
    double offset_q1_mhz = 0.0;
    double offset_q2_mhz = 0.0;
    double offset_j_mhz = 0.0;
    ChannelRates rates;
};

/// Applies T1/T2 decay of both qubits over `duration_us` and the given two-qubit
/// depolarizing probability.
CMatrix apply_decoherence(const CMatrix &rho, const ChannelRates &rates, double duration_us,
                          double depolarizing_p);

}  // namespace donorsim

#endif
