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

#ifndef DONORSIM_COHERENCE_H
#define DONORSIM_COHERENCE_H

#include <cstdint>
#include <vector>

#include "donorsim/fitting.h"
#include "donorsim/noise_models.h"
#include "donorsim/readout.h"
#include "donorsim/spin_model.h"

namespace donorsim {

struct CoherenceOptions {
    Qubit target = Qubit::Q1;
    /// State of the other electron; the pulses address the matching conditional line.
    Spin control = Spin::Down;
    /// Ramsey: virtual detuning added as a phase 2 pi f tau on the final pulse.
    /// Hahn: the same phase ramp, producing the artificial echo oscillation.
    double detuning_mhz = 0.0;
    int shots = 1000;
    /// When false, exact outcome probabilities are averaged instead of sampled.
    bool sample_outcomes = true;
    /// Instantaneous ideal pulses; finite pulses use the pulse-level processor.
    bool hard_pulses = true;
    double rabi_mhz = 0.2;
    ReadoutModel readout = ReadoutModel::perfect();

    void validate() const;
};

struct CoherenceCurve {
    std::vector<double> taus_us;
    std::vector<double> p_up;
    std::vector<double> stderr_p;
    DecayFit fit;
    /// Fitted T2* (Ramsey) or T2 (Hahn) in microseconds; infinite when unresolved.
    double t2_us = 0.0;
};

/// pi/2 - wait(tau) - pi/2 with fresh noise per shot; fit of a Gaussian-envelope
/// oscillation. Throws std::invalid_argument for unsorted taus or shots < 1.
CoherenceCurve ramsey_experiment(const std::vector<double> &taus_us, const SpinSystemParams &spin,
                                 const NuclearConfig &nucs, const NoiseParams &noise, const CoherenceOptions &options,
                                 uint64_t seed);

/// pi/2 - tau/2 - pi - tau/2 - pi/2(phase 2 pi f tau); stretched-exponential fit.
CoherenceCurve hahn_experiment(const std::vector<double> &taus_us, const SpinSystemParams &spin,
                               const NuclearConfig &nucs, const NoiseParams &noise, const CoherenceOptions &options,
                               uint64_t seed);

/// Gaussian quasi-static dephasing time sqrt(2) / (2 pi sigma).
double analytic_t2star_us(double sigma_mhz);

}  // namespace donorsim

#endif
