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

#include "donorsim/readout.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "donorsim/channels.h"

namespace donorsim {

namespace {

CMatrix spin_projector(Qubit qubit, Spin s) {
    CMatrix p = CMatrix::Zero(2, 2);
    p(static_cast<int>(s), static_cast<int>(s)) = 1.0;
    return embed(p, index_of(qubit) - 1, {2, 2});
}

Spin report(Spin truth, const ReadoutModel &model, Rng &rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double p_up = truth == Spin::Up ? model.p_up_given_up : model.p_up_given_down;
    return u(rng) < p_up ? Spin::Up : Spin::Down;
}

/// Replaces the state of `qubit` by |down>, keeping the rest of the state.
DensityMatrix reset_to_down(const DensityMatrix &rho, Qubit qubit) {
    // Kraus operators |down><down| and |down><up| on `qubit`.
    CMatrix k0 = CMatrix::Zero(2, 2), k1 = CMatrix::Zero(2, 2);
    k0(0, 0) = 1.0;
    k1(0, 1) = 1.0;
    Channel reset{{k0, k1}};
    return reset.on_qubit(index_of(qubit)).apply(rho);
}

}  // namespace

int ReadoutModel::up_threshold() const {
    if (rule == CombineRule::Threshold) {
        return threshold;
    }
    return n_qnd / 2 + 1;
}

void ReadoutModel::validate() const {
    for (double p : {p_up_given_up, p_up_given_down}) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw std::invalid_argument("readout probabilities must be in [0, 1]");
        }
    }
    if (n_qnd < 1) {
        throw std::invalid_argument("n_qnd must be at least 1");
    }
    if (!(t1_s > 0.0)) {
        throw std::invalid_argument("readout t1 must be positive");
    }
    if (!(cycle_time_s >= 0.0)) {
        throw std::invalid_argument("cycle time must be non-negative");
    }
    if (rule == CombineRule::Threshold && (threshold < 0 || threshold > n_qnd + 1)) {
        throw std::invalid_argument("threshold must be in [0, n_qnd + 1]");
    }
}

ReadoutModel ReadoutModel::perfect() {
    ReadoutModel m;
    m.p_up_given_up = 1.0;
    m.p_up_given_down = 0.0;
    return m;
}

Spin measure_electron(DensityMatrix &rho, Qubit qubit, const ReadoutModel &model, Rng &rng) {
    CMatrix p_up = spin_projector(qubit, Spin::Up);
    double prob_up = std::clamp((p_up * rho).trace().real(), 0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Spin truth = u(rng) < prob_up ? Spin::Up : Spin::Down;
    CMatrix p = spin_projector(qubit, truth);
    DensityMatrix post = p * rho * p;
    double tr = post.trace().real();
    if (tr > 0.0) {
        rho = post / tr;
    }
    return report(truth, model, rng);
}

Spin qnd_readout(DensityMatrix &rho, const ReadoutModel &model, Rng &rng, Qubit target) {
    model.validate();
    const Qubit ancilla = other(target);
    const Unitary flip = native_gate(GateLabel::crot(ancilla, ControlCondition::Up, kPi));
    const bool decays = std::isfinite(model.t1_s) && model.cycle_time_s > 0.0;
    const Channel t1 = channel(ChannelKind::T1, decays ? 1.0 / model.t1_s : 0.0, model.cycle_time_s)
                           .on_qubit(index_of(target));
    int ups = 0;
    for (int cycle = 0; cycle < model.n_qnd; ++cycle) {
        rho = reset_to_down(rho, ancilla);
        rho = flip * rho * flip.adjoint();
        if (measure_electron(rho, ancilla, model, rng) == Spin::Up) {
            ++ups;
        }
        if (decays) {
            rho = t1.apply(rho);
        }
    }
    return ups >= model.up_threshold() ? Spin::Up : Spin::Down;
}

Confusion direct_confusion(const ReadoutModel &model) {
    return Confusion{model.p_up_given_up, model.p_up_given_down};
}

Confusion qnd_confusion(const ReadoutModel &model) {
    model.validate();
    const int n = model.n_qnd;
    const double survive = (std::isfinite(model.t1_s) && model.cycle_time_s > 0.0)
                               ? std::exp(-model.cycle_time_s / model.t1_s)
                               : 1.0;
    // dist[s][k]: probability that the target is in spin s with k "up" verdicts so far.
    auto run = [&](int initial) {
        std::vector<std::vector<double>> dist(2, std::vector<double>(n + 1, 0.0));
        dist[initial][0] = 1.0;
        for (int cycle = 0; cycle < n; ++cycle) {
            std::vector<std::vector<double>> next(2, std::vector<double>(n + 1, 0.0));
            for (int s = 0; s < 2; ++s) {
                double p_up = s == 1 ? model.p_up_given_up : model.p_up_given_down;
                for (int k = 0; k <= cycle; ++k) {
                    double w = dist[s][k];
                    if (w == 0.0) continue;
                    for (int verdict = 0; verdict < 2; ++verdict) {
                        double pv = verdict ? p_up : 1.0 - p_up;
                        int k2 = k + verdict;
                        if (s == 1) {
                            next[1][k2] += w * pv * survive;
                            next[0][k2] += w * pv * (1.0 - survive);
                        } else {
                            next[0][k2] += w * pv;
                        }
                    }
                }
            }
            dist = std::move(next);
        }
        double up = 0.0;
        for (int k = model.up_threshold(); k <= n; ++k) {
            up += dist[0][k] + dist[1][k];
        }
        return up;
    };
    return Confusion{run(1), run(0)};
}

DensityMatrix initialize(const StateSpec &spec, double prep_error) {
    if (!(prep_error >= 0.0 && prep_error <= 1.0)) {
        throw std::invalid_argument("preparation error must be in [0, 1]");
    }
    CVector psi = CVector::Zero(4);
    if (std::holds_alternative<std::string>(spec)) {
        const std::string &name = std::get<std::string>(spec);
        const double r = 1.0 / std::sqrt(2.0);
        if (name == "dd") {
            psi(0) = 1.0;
        } else if (name == "du") {
            psi(1) = 1.0;
        } else if (name == "ud") {
            psi(2) = 1.0;
        } else if (name == "uu") {
            psi(3) = 1.0;
        } else if (name == "phi+") {
            psi(0) = r;
            psi(3) = r;
        } else if (name == "phi-") {
            psi(0) = r;
            psi(3) = -r;
        } else if (name == "psi+") {
            psi(1) = r;
            psi(2) = r;
        } else if (name == "psi-") {
            psi(1) = r;
            psi(2) = -r;
        } else {
            throw std::invalid_argument("unknown state spec: " + name);
        }
    } else {
        psi = std::get<CVector>(spec);
        if (psi.size() != 4) {
            throw std::invalid_argument("custom state must have 4 amplitudes");
        }
        double nrm = psi.norm();
        if (!(nrm > 1e-12) || !std::isfinite(nrm)) {
            throw std::invalid_argument("custom state is not normalizable");
        }
        psi /= nrm;
    }
    DensityMatrix rho = psi * psi.adjoint();
    if (prep_error > 0.0) {
        Channel flip{{std::sqrt(1.0 - prep_error) * identity(2), std::sqrt(prep_error) * pauli(1)}};
        rho = flip.on_qubit(1).apply(rho);
        rho = flip.on_qubit(2).apply(rho);
    }
    return rho;
}

}  // namespace donorsim
