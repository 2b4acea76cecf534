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

#ifndef DONORSIM_TOMOGRAPHY_H
#define DONORSIM_TOMOGRAPHY_H

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "donorsim/noise_models.h"
#include "donorsim/pulse_engine.h"
#include "donorsim/readout.h"

namespace donorsim {

struct PhaseReversalData {
    std::vector<double> phases;
    std::vector<double> p_up_q1;
    std::vector<double> p_up_q2;
    int shots = 0;
    bool spam_corrected = false;
};

/// Density-matrix corners in the |dd>, |du>, |ud>, |uu> basis (1-based names).
struct Corners {
    double rho11 = 0.0;
    double rho44 = 0.0;
    Complex rho14 = 0.0;
    /// Fitted coherence exceeds sqrt(rho11 rho44) (kept, not clipped).
    bool exceeds_bound = false;

    Complex rho41() const { return std::conj(rho14); }
};

/// X90 on Q1, then the entangling CROT on Q2; maps |dd> to Phi+.
Circuit bell_prep_circuit();

/// Reversed circuit: inverse gates in reverse order, every drive phase advanced by `phase`.
Circuit reversal_circuit(const Circuit &prep, double phase);

struct BellExperimentConfig {
    ProcessorConfig processor;
    NoiseParams noise;
    ReadoutModel readout = ReadoutModel::perfect();
    double prep_error = 0.0;
    /// Depolarizing probability applied to the state right after preparation.
    double state_depolarizing = 0.0;
    /// Optional extra map applied to the prepared state (after depolarizing).
    std::function<DensityMatrix(const DensityMatrix &)> state_channel;
    int shots = 10000;
    /// Quasi-static noise realizations averaged per phase point.
    int noise_samples = 64;
    std::vector<double> phases;

    void validate() const;
};

/// Evenly spaced phases covering [0, 2 pi).
std::vector<double> default_phases(int n = 24);

/// Runs prep + phase-swept reversal and measures Q1 directly and Q2 by QND readout.
PhaseReversalData phase_reversal_experiment(const BellExperimentConfig &config, uint64_t seed);

/// Z-basis populations (dd, du, ud, uu) of the prepared state, as reported outcomes.
std::array<double, 4> measure_populations(const BellExperimentConfig &config, uint64_t seed);

/// Least-squares fit of C + a cos 2phi + b sin 2phi; returns {C, a, b}.
std::array<double, 3> fit_reversal_curve(const std::vector<double> &phases, const std::vector<double> &values);

/// Corners from the Q1 reversal curve and separately measured populations.
/// Throws std::invalid_argument when data and phases disagree or populations are not normalized.
Corners extract_corners(const PhaseReversalData &data, const std::array<double, 4> &populations);

/// <Phi+|rho|Phi+> from the corners: (rho11 + rho44)/2 + Re rho14.
double bell_fidelity(const Corners &c);

/// Inverts readout confusion (Q1 direct, Q2 QND) and bit-flip preparation error.
/// Throws std::domain_error when either readout contrast is zero.
PhaseReversalData spam_correct(const PhaseReversalData &data, const ReadoutModel &readout, double prep_error);
std::array<double, 4> spam_correct_populations(const std::array<double, 4> &populations,
                                               const ReadoutModel &readout, double prep_error);

/// Density matrix with the given populations on the diagonal and the corner coherences.
DensityMatrix corner_density_matrix(const Corners &c, const std::array<double, 4> &populations);

/// Wootters concurrence. Throws std::invalid_argument for non-PSD input.
double concurrence(const DensityMatrix &rho);

struct BellTomographyResult {
    PhaseReversalData raw;
    PhaseReversalData corrected;
    std::array<double, 4> populations_raw{};
    std::array<double, 4> populations_corrected{};
    Corners corners_raw;
    Corners corners_corrected;
    double fidelity_raw = 0.0;
    double fidelity_corrected = 0.0;
    DensityMatrix rho_physical;
    double concurrence = 0.0;
};

BellTomographyResult bell_tomography(const BellExperimentConfig &config, uint64_t seed);

struct RepeatedBellResult {
    std::vector<BellTomographyResult> runs;
    double fidelity_mean = 0.0;
    double fidelity_two_sigma = 0.0;
    double fidelity_raw_mean = 0.0;
    double fidelity_raw_two_sigma = 0.0;
    double concurrence_mean = 0.0;
    double concurrence_two_sigma = 0.0;
};

/// Repeats the full tomography `repetitions` times; error bars are 2 sample standard deviations.
RepeatedBellResult repeated_bell_tomography(const BellExperimentConfig &config, int repetitions, uint64_t seed);

}  // namespace donorsim

#endif
