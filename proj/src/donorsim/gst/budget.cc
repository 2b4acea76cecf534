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

#include "donorsim/gst/budget.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace donorsim::gst {

const GateBudget &ErrorBudget::at(const std::string &label) const {
    for (const auto &g : gates) {
        if (g.label == label) return g;
    }
    throw std::invalid_argument("budget has no gate '" + label + "'");
}

RVector rotation_generator(const CMatrix &unitary) {
    const int dim = static_cast<int>(unitary.rows());
    const int nq = num_qubits_for_dim(dim);
    Eigen::ComplexEigenSolver<CMatrix> es(unitary);
    CVector phases(dim);
    for (int k = 0; k < dim; ++k) phases(k) = -std::arg(es.eigenvalues()(k));
    CMatrix v = es.eigenvectors();
    CMatrix kmat = v * phases.asDiagonal() * v.inverse();
    const auto &basis = pauli_basis(nq);
    RVector out(basis.size() - 1);
    for (size_t p = 1; p < basis.size(); ++p) {
        out(p - 1) = 2.0 * (basis[p] * kmat).trace().real() / dim;
    }
    return out;
}

namespace {

/// Pauli digit (0..3) of `pauli` on qubit q (0 = Q1).
int digit(int num_qubits, int pauli, int q) { return (pauli >> (2 * (num_qubits - 1 - q))) & 3; }

bool z_type(int num_qubits, int pauli) {
    for (int q = 0; q < num_qubits; ++q) {
        int d = digit(num_qubits, pauli, q);
        if (d != 0 && d != 3) return false;
    }
    return true;
}

/// Target qubit index (0 = Q1) from labels like Gx1d; -1 for the idle.
int target_of(const std::string &label, int num_qubits) {
    if (label == "Gi") return -1;
    if (num_qubits == 1) return 0;
    if (label.size() >= 3 && (label[2] == '1' || label[2] == '2')) return label[2] - '1';
    return -1;
}

double angle_between(const RVector &a, const RVector &b) {
    const double c = a.dot(b) / (a.norm() * b.norm());
    return std::acos(std::clamp(c, -1.0, 1.0));
}

}  // namespace

ErrorBudget error_budget(const GateSet &estimate, const GateSet &target) {
    estimate.validate();
    target.validate();
    if (estimate.labels != target.labels) {
        throw std::invalid_argument("estimate and target gate labels differ");
    }
    const int nq = target.num_qubits;
    const int dim = target.dim();
    const int npauli = target.ptm_dim();
    const double c = static_cast<double>(dim) / (dim + 1);
    ErrorBudget out;
    std::map<std::string, RVector> est_axes, target_axes;

    for (const auto &l : target.labels) {
        auto uit = target.unitaries.find(l);
        if (uit == target.unitaries.end()) {
            throw std::invalid_argument("target gate '" + l + "' has no unitary");
        }
        GateBudget b;
        b.label = l;
        b.fidelity = average_gate_fidelity(estimate.gate(l), target.gate(l));
        b.infidelity = 1.0 - b.fidelity;
        b.generator = ErrorGenerator::zero(nq);
        try {
            b.generator = project_generator(error_generator(estimate.gate(l), target.gate(l)), nq);
        } catch (const std::domain_error &) {
            b.branch_warning = true;
        }
        const RVector &h = b.generator.h;
        const RVector &s = b.generator.s;
        if (h.cwiseAbs().maxCoeff() > kPi / 2) b.branch_warning = true;

        const RVector k = rotation_generator(uit->second);
        double h_par2 = 0.0;
        if (k.norm() > 1e-9) {
            b.over_rotation_rad = h.dot(k.normalized());
            h_par2 = b.over_rotation_rad * b.over_rotation_rad;
        } else {
            for (int p = 1; p < npauli; ++p) {
                if (z_type(nq, p)) h_par2 += h(p - 1) * h(p - 1);
            }
            b.over_rotation_rad = std::sqrt(h_par2);
        }
        b.axis_misalignment_rad = std::sqrt(std::max(0.0, h.squaredNorm() - h_par2));
        b.coherent_infidelity = c * h.squaredNorm() / 4.0;
        b.incoherent_infidelity = std::max(0.0, c * s.sum());
        const double gen = b.coherent_infidelity + b.incoherent_infidelity;
        b.generator_fidelity = 1.0 - gen;
        b.incoherent_fraction = gen > 0.0 ? b.incoherent_infidelity / gen : 0.0;

        const double r_dep = std::max(0.0, s.minCoeff());
        b.depolarizing_p = -std::expm1(-static_cast<double>(npauli) * r_dep);
        const int t = target_of(l, nq);
        double dephasing = 0.0, control_dephasing = 0.0, other = 0.0;
        for (int p = 1; p < npauli; ++p) {
            const double excess = s(p - 1) - r_dep;
            bool on_target = false, on_control = false;
            if (z_type(nq, p)) {
                if (t < 0 || nq == 1) {
                    on_target = true;
                } else {
                    const bool zt = digit(nq, p, t) == 3, zc = digit(nq, p, 1 - t) == 3;
                    on_target = zt;
                    on_control = zc && !zt;
                }
            }
            (on_target ? dephasing : on_control ? control_dephasing : other) += excess;
        }
        b.categories["over-rotation"] = c * h_par2 / 4.0;
        b.categories["axis misalignment"] = c * (h.squaredNorm() - h_par2) / 4.0;
        b.categories["depolarization"] = c * (npauli - 1) * r_dep;
        b.categories["dephasing"] = c * dephasing;
        b.categories["control dephasing"] = c * control_dephasing;
        b.categories["other stochastic"] = c * other;

        CMatrix h_err = CMatrix::Zero(dim, dim);
        const auto &basis = pauli_basis(nq);
        for (int p = 1; p < npauli; ++p) h_err += 0.5 * h(p - 1) * basis[p];
        est_axes[l] = rotation_generator(evolve(h_err, 1.0 / kTwoPi) * uit->second);
        target_axes[l] = k;
        out.gates.push_back(std::move(b));
    }

    for (const auto &l : target.labels) {
        if (l.rfind("Gx", 0) != 0) continue;
        const std::string y = "Gy" + l.substr(2);
        if (!est_axes.count(y)) continue;
        PairMisalignment pm;
        pm.x_label = l;
        pm.y_label = y;
        pm.angle_error_rad =
            angle_between(est_axes[l], est_axes[y]) - angle_between(target_axes[l], target_axes[y]);
        out.pairs.push_back(pm);
    }
    return out;
}

}  // namespace donorsim::gst
