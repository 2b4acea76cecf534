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

#ifndef DONORSIM_NOISE_MODELS_H
#define DONORSIM_NOISE_MODELS_H

#include <limits>
#include <vector>

#include "donorsim/channels.h"
#include "donorsim/pulse_engine.h"
#include "donorsim/rng.h"

namespace donorsim {

/// One two-level fluctuator (a nearby 29Si spin) shifting `qubit` by +-amplitude/2.
struct JumpCoupling {
    Qubit qubit = Qubit::Q1;
    double amplitude_mhz = 0.0;
};

struct NoiseParams {
    double sigma_detuning_q1_mhz = 0.0;
    double sigma_detuning_q2_mhz = 0.0;
    std::vector<JumpCoupling> jumps;
    /// Probability that each fluctuator flips between consecutive shots.
    double jump_rate = 0.0;
    /// Flip rate of each fluctuator during a shot (1/us); zero keeps them static within a shot.
    double jump_rate_in_shot_per_us = 0.0;
    double t1_s = std::numeric_limits<double>::infinity();
    double t2_hahn_us = std::numeric_limits<double>::infinity();
    double sigma_j_mhz = 0.0;
    double depolarizing_per_gate = 0.0;
    double idle_depolarizing = 0.0;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
    ChannelRates rates() const;
    bool quasi_static_only() const;
};

/// Stationary sample: Gaussian offsets plus telegraph terms with random sign.
NoiseRealization sample_realization(const NoiseParams &params, Rng &rng);

/// Shot-to-shot noise sequence. Fluctuator signs persist between shots and
/// flip with probability jump_rate; Gaussian offsets are redrawn every shot.
class NoiseProcess {
   public:
    NoiseProcess(NoiseParams params, uint64_t seed, uint64_t stream = 0);

    NoiseRealization next();
    /// Fluctuator signs (+1 / -1) of the most recent shot.
    const std::vector<int> &signs() const { return signs_; }
    const NoiseParams &params() const { return params_; }
    Rng &rng() { return rng_; }

   private:
    NoiseParams params_;
    Rng rng_;
    std::vector<int> signs_;
    bool started_ = false;
};

struct GeometricPhaseResult {
    /// Relative phase acquired by the control superposition (total, rad).
    double control_phase_total = 0.0;
    /// Dynamic part of the target's phase in the driven branch.
    double dynamic_phase = 0.0;
    /// control_phase_total - dynamic_phase, wrapped to (-pi, pi].
    double control_phase_geometric = 0.0;
    /// Minus half the signed solid angle enclosed by the target Bloch trajectory
    /// (closed by a geodesic), wrapped to (-pi, pi].
    double half_solid_angle = 0.0;
    /// Distance of the final target Bloch vector from its start.
    double closure_error = 0.0;
};

/// Drives the target, in the control-up branch only, with the given detuning
/// (MHz) and Rabi frequency for a generalized rotation angle `rotation` (the
/// nutation angle about the tilted axis), starting from |down>. The control starts
/// in (|down> + |up>)/sqrt(2). Integrated with RK4 on `steps` steps.
/// Throws std::invalid_argument outside |detuning| < 2 rabi.
GeometricPhaseResult geometric_phase_analysis(double detuning_mhz, double rabi_mhz, double rotation_rad,
                                              int steps = 4000);

/// Signed solid angle (mod 4 pi) of a closed polygon of unit vectors; the last
/// point must repeat the first.
double spherical_polygon_solid_angle(const std::vector<Eigen::Vector3d> &points);

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

}  // namespace donorsim

#endif
