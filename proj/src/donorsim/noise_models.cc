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

#include "donorsim/noise_models.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace donorsim {

namespace {

void require_non_negative(double v, const char *name) {
    if (!(v >= 0.0)) {
        throw std::invalid_argument(std::string("noise.") + name + " must be non-negative");
    }
}

}  // namespace

void NoiseParams::validate() const {
    require_non_negative(sigma_detuning_q1_mhz, "sigma_detuning_q1_mhz");
    require_non_negative(sigma_detuning_q2_mhz, "sigma_detuning_q2_mhz");
    require_non_negative(jump_rate, "jump_rate");
    if (jump_rate > 1.0) {
        throw std::invalid_argument("noise.jump_rate is a per-shot probability and must be <= 1");
    }
    require_non_negative(jump_rate_in_shot_per_us, "jump_rate_in_shot_per_us");
    require_non_negative(t1_s, "t1_s");
    require_non_negative(t2_hahn_us, "t2_hahn_us");
    require_non_negative(sigma_j_mhz, "sigma_j_mhz");
    require_non_negative(depolarizing_per_gate, "depolarizing_per_gate");
    require_non_negative(idle_depolarizing, "idle_depolarizing");
    for (size_t k = 0; k < jumps.size(); ++k) {
        if (!(jumps[k].amplitude_mhz >= 0.0)) {
            throw std::invalid_argument("noise.jumps[" + std::to_string(k) + "].amplitude_mhz must be non-negative");
        }
    }
}

ChannelRates NoiseParams::rates() const {
    ChannelRates r;
    r.t1_s = t1_s;
    r.t2_us = t2_hahn_us;
    r.depolarizing_per_gate = depolarizing_per_gate;
    r.idle_depolarizing = idle_depolarizing;
    return r;
}

bool NoiseParams::quasi_static_only() const {
    bool jumps_static = jump_rate_in_shot_per_us == 0.0;
    return jumps_static && sigma_j_mhz == 0.0 && std::isinf(t1_s) && std::isinf(t2_hahn_us) &&
           depolarizing_per_gate == 0.0 && idle_depolarizing == 0.0;
}

namespace {

NoiseRealization realization_from(const NoiseParams &params, const std::vector<int> &signs, Rng &rng) {
    NoiseRealization r;
    std::normal_distribution<double> normal(0.0, 1.0);
    r.offset_q1_mhz = params.sigma_detuning_q1_mhz * normal(rng);
    r.offset_q2_mhz = params.sigma_detuning_q2_mhz * normal(rng);
    r.offset_j_mhz = params.sigma_j_mhz * normal(rng);
    for (size_t k = 0; k < params.jumps.size(); ++k) {
        double shift = 0.5 * signs[k] * params.jumps[k].amplitude_mhz;
        (params.jumps[k].qubit == Qubit::Q1 ? r.offset_q1_mhz : r.offset_q2_mhz) += shift;
    }
    r.rates = params.rates();
    return r;
}

}  // namespace

NoiseRealization sample_realization(const NoiseParams &params, Rng &rng) {
    params.validate();
    std::bernoulli_distribution coin(0.5);
    std::vector<int> signs(params.jumps.size());
    for (auto &s : signs) {
        s = coin(rng) ? 1 : -1;
    }
    return realization_from(params, signs, rng);
}

NoiseProcess::NoiseProcess(NoiseParams params, uint64_t seed, uint64_t stream)
    : params_(std::move(params)), rng_(make_stream(seed, stream, 0x6e6f697365ULL)) {
    params_.validate();
}

NoiseRealization NoiseProcess::next() {
    if (!started_) {
        std::bernoulli_distribution coin(0.5);
        signs_.resize(params_.jumps.size());
        for (auto &s : signs_) {
            s = coin(rng_) ? 1 : -1;
        }
        started_ = true;
    } else if (params_.jump_rate > 0.0) {
        std::bernoulli_distribution flip(params_.jump_rate);
        for (auto &s : signs_) {
            if (flip(rng_)) {
                s = -s;
            }
        }
    }
    return realization_from(params_, signs_, rng_);
}

double wrap_angle(double a) {
    double w = std::remainder(a, kTwoPi);
    return w <= -kPi ? w + kTwoPi : w;
}

double spherical_polygon_solid_angle(const std::vector<Eigen::Vector3d> &points) {
    // Van Oosterom-Strackee triangles fanned from the axis direction farthest from
    // the path and its antipodes, so no triangle degenerates.
    Eigen::Vector3d ref = Eigen::Vector3d::UnitZ();
    double best = -1.0;
    for (int axis = 0; axis < 3; ++axis) {
        for (double sign : {1.0, -1.0}) {
            Eigen::Vector3d r = Eigen::Vector3d::Zero();
            r(axis) = sign;
            double closest = 4.0;
            for (const auto &p : points) closest = std::min({closest, (p - r).squaredNorm(), (p + r).squaredNorm()});
            if (closest > best) {
                best = closest;
                ref = r;
            }
        }
    }
    double total = 0.0;
    for (size_t k = 0; k + 1 < points.size(); ++k) {
        const Eigen::Vector3d &b = points[k];
        const Eigen::Vector3d &c = points[k + 1];
        double num = ref.dot(b.cross(c));
        double den = 1.0 + ref.dot(b) + b.dot(c) + c.dot(ref);
        total += 2.0 * std::atan2(num, den);
    }
    return total;
}

GeometricPhaseResult geometric_phase_analysis(double detuning_mhz, double rabi_mhz, double rotation_rad, int steps) {
    if (!(rabi_mhz > 0.0)) {
        throw std::invalid_argument("geometric phase analysis needs a positive rabi frequency");
    }
    if (!(std::abs(detuning_mhz) < 2.0 * rabi_mhz)) {
        throw std::invalid_argument("geometric phase analysis requires |detuning| < 2 rabi");
    }
    if (steps < 10) {
        throw std::invalid_argument("geometric phase analysis needs at least 10 steps");
    }
    // Rotating frame of the drive: target Hamiltonian (MHz) in the control-up branch.
    CMatrix h_t = detuning_mhz * spin_z() + rabi_mhz * spin_x();
    const double omega_eff = std::hypot(rabi_mhz, detuning_mhz);
    const double duration = std::abs(rotation_rad) / (kTwoPi * omega_eff);

    // Basis: control (x) target, control-down branch undriven.
    CMatrix up_proj = CMatrix::Zero(2, 2);
    up_proj(1, 1) = 1.0;
    CMatrix h = kron(up_proj, h_t);
    CVector psi(4);
    psi << 1.0 / std::sqrt(2.0), 0.0, 1.0 / std::sqrt(2.0), 0.0;

    auto deriv = [&](const CVector &v) -> CVector { return -kI * kTwoPi * (h * v); };
    auto bloch = [](const CVector &t) -> Eigen::Vector3d {
        double n = t.squaredNorm();
        Complex c = std::conj(t(0)) * t(1);
        // (|down>, |up>) ordering: z = |up|^2 - |down|^2, x + i y from <down|..|up>.
        return Eigen::Vector3d(2.0 * c.real() / n, -2.0 * c.imag() / n, (std::norm(t(1)) - std::norm(t(0))) / n);
    };
    auto energy = [&](const CVector &v) -> double {
        CVector t = v.segment(2, 2);
        return (t.adjoint() * h_t * t)(0).real() / t.squaredNorm();
    };

    const double dt = duration / steps;
    std::vector<Eigen::Vector3d> path;
    path.reserve(steps + 2);
    path.push_back(bloch(psi.segment(2, 2)));
    double dyn_integral = 0.0;
    double e_prev = energy(psi);
    for (int s = 0; s < steps; ++s) {
        CVector k1 = deriv(psi);
        CVector k2 = deriv(psi + 0.5 * dt * k1);
        CVector k3 = deriv(psi + 0.5 * dt * k2);
        CVector k4 = deriv(psi + dt * k3);
        psi += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        double e = energy(psi);
        dyn_integral += 0.5 * (e + e_prev) * dt;
        e_prev = e;
        path.push_back(bloch(psi.segment(2, 2)));
    }
    if (!psi.allFinite()) {
        throw std::runtime_error("geometric phase trajectory integration diverged");
    }

    GeometricPhaseResult out;
    // Control coherence <up|rho_c|down> picks up the overlap of the driven target
    // branch with its initial state.
    Complex up_branch = psi(2);
    Complex down_branch = psi(0);
    out.control_phase_total = wrap_angle(std::arg(up_branch * std::conj(down_branch)));
    out.dynamic_phase = -kTwoPi * dyn_integral;
    out.control_phase_geometric = wrap_angle(out.control_phase_total - out.dynamic_phase);
    out.closure_error = (path.back() - path.front()).norm();
    if (path.size() > 1 && out.closure_error > 0.0) {
        path.push_back(path.front());
    }
    out.half_solid_angle = wrap_angle(-0.5 * spherical_polygon_solid_angle(path));
    return out;
}

}  // namespace donorsim
