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

#include "donorsim/gst/gauge.h"

#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>

#include "donorsim/fitting.h"

namespace donorsim::gst {

GateSet apply_gauge(const GateSet &gs, const RMatrix &transform) {
    const RMatrix inv = transform.inverse();
    GateSet out = gs;
    for (auto &[l, g] : out.gates) {
        g = transform * g * inv;
    }
    out.rho = transform * gs.rho;
    for (auto &e : out.effects) {
        e = inv.transpose() * e;
    }
    out.unitaries.clear();
    return out;
}

namespace {

void check_compatible(const GateSet &a, const GateSet &b) {
    a.validate();
    b.validate();
    if (a.num_qubits != b.num_qubits || a.labels != b.labels || a.effects.size() != b.effects.size()) {
        throw std::invalid_argument("gate sets are not comparable");
    }
}

RVector gauge_residuals(const GateSet &gs, const GateSet &target, double spam_weight) {
    const int n = gs.ptm_dim();
    const int per = n * n;
    RVector r(gs.labels.size() * per + n * (1 + gs.effects.size()));
    int at = 0;
    for (const auto &l : gs.labels) {
        RMatrix diff = gs.gate(l) - target.gate(l);
        r.segment(at, per) = Eigen::Map<const RVector>(diff.data(), per);
        at += per;
    }
    const double w = std::sqrt(spam_weight);
    r.segment(at, n) = w * (gs.rho - target.rho);
    at += n;
    for (size_t k = 0; k < gs.effects.size(); ++k) {
        r.segment(at, n) = w * (gs.effects[k] - target.effects[k]);
        at += n;
    }
    return r;
}

/// Least-squares T with T G = G_t T, T rho = rho_t, e^T = e_t^T T.
RMatrix linear_gauge(const GateSet &est, const GateSet &target, double spam_weight, bool tp) {
    const int n = est.ptm_dim();
    const int unknowns = n * n;
    const RMatrix id = RMatrix::Identity(n, n);
    std::vector<RMatrix> blocks;
    std::vector<RVector> rhs;
    for (const auto &l : est.labels) {
        // vec(T G) = (G^T kron I) vec(T), vec(G_t T) = (I kron G_t) vec(T).
        blocks.push_back(RMatrix(Eigen::kroneckerProduct(RMatrix(est.gate(l).transpose()), id)) -
                         RMatrix(Eigen::kroneckerProduct(id, target.gate(l))));
        rhs.push_back(RVector::Zero(unknowns));
    }
    const double w = std::sqrt(spam_weight);
    blocks.push_back(w * RMatrix(Eigen::kroneckerProduct(RMatrix(est.rho.transpose()), id)));
    rhs.push_back(w * target.rho);
    for (size_t k = 0; k < est.effects.size(); ++k) {
        blocks.push_back(w * RMatrix(Eigen::kroneckerProduct(id, RMatrix(target.effects[k].transpose()))));
        rhs.push_back(w * est.effects[k]);
    }
    int rows = 0;
    for (const auto &b : blocks) rows += static_cast<int>(b.rows());
    RMatrix a(rows, unknowns);
    RVector b(rows);
    int at = 0;
    for (size_t k = 0; k < blocks.size(); ++k) {
        a.middleRows(at, blocks[k].rows()) = blocks[k];
        b.segment(at, blocks[k].rows()) = rhs[k];
        at += static_cast<int>(blocks[k].rows());
    }
    RVector t;
    if (tp) {
        // First row of T is e_0: entries (0, j) sit at vec index j * n.
        std::vector<int> free;
        RVector fixed = RVector::Zero(unknowns);
        fixed(0) = 1.0;
        for (int k = 0; k < unknowns; ++k) {
            if (k % n != 0) free.push_back(k);
        }
        RMatrix af(rows, free.size());
        for (size_t k = 0; k < free.size(); ++k) af.col(k) = a.col(free[k]);
        RVector x = af.colPivHouseholderQr().solve(b - a * fixed);
        t = fixed;
        for (size_t k = 0; k < free.size(); ++k) t(free[k]) = x(k);
    } else {
        t = a.colPivHouseholderQr().solve(b);
    }
    return Eigen::Map<RMatrix>(t.data(), n, n);
}

}  // namespace

double gauge_distance(const GateSet &gs, const GateSet &target, double spam_weight) {
    check_compatible(gs, target);
    return gauge_residuals(gs, target, spam_weight).norm();
}

RMatrix unitary_gauge(const RVector &generator, int num_qubits) {
    const auto &basis = pauli_basis(num_qubits);
    const int dim = 1 << num_qubits;
    CMatrix h = CMatrix::Zero(dim, dim);
    for (int k = 1; k < static_cast<int>(basis.size()); ++k) {
        h += 0.5 * generator(k - 1) * basis[k];
    }
    return ptm_from_unitary(evolve(h, 1.0 / kTwoPi));
}

GaugeResult gauge_optimize(const GateSet &estimate, const GateSet &target, const GaugeOptions &options) {
    check_compatible(estimate, target);
    if (!(options.spam_weight >= 0.0)) {
        throw std::invalid_argument("gauge spam weight must be non-negative");
    }
    const int n = estimate.ptm_dim();
    const int nq = estimate.num_qubits;
    std::function<RMatrix(const RVector &)> transform;
    RVector x0;
    if (options.group == GaugeGroup::Unitary) {
        transform = [nq](const RVector &x) { return unitary_gauge(x, nq); };
        x0 = RVector::Zero(n - 1);
    } else {
        const bool tp = options.group == GaugeGroup::TP;
        RMatrix t0 = linear_gauge(estimate, target, options.spam_weight, tp);
        if (!t0.allFinite() || std::abs(t0.determinant()) < 1e-12) {
            t0 = RMatrix::Identity(n, n);
        }
        // Parameterize T = T0 (I + D) with D free (first row zero for TP).
        const int first = tp ? 1 : 0;
        transform = [t0, n, first](const RVector &x) {
            RMatrix d = RMatrix::Zero(n, n);
            int at = 0;
            for (int j = 0; j < n; ++j)
                for (int i = first; i < n; ++i) d(i, j) = x(at++);
            return RMatrix(t0 * (RMatrix::Identity(n, n) + d));
        };
        x0 = RVector::Zero((n - first) * n);
    }
    const int m = static_cast<int>(gauge_residuals(estimate, target, options.spam_weight).size());
    auto residuals = [&](const RVector &x) {
        RMatrix t = transform(x);
        if (std::abs(t.determinant()) < 1e-14) {
            return RVector(RVector::Constant(m, 1e6));
        }
        return gauge_residuals(apply_gauge(estimate, t), target, options.spam_weight);
    };
    LeastSquaresResult fit =
        least_squares([&](const RVector &x, RVector &r) { r = residuals(x); }, x0, m, options.max_evaluations);
    GaugeResult out;
    RVector x = fit.params;
    if (residuals(x).norm() > residuals(x0).norm()) {
        x = x0;
    }
    out.transform = transform(x);
    out.gateset = apply_gauge(estimate, out.transform);
    out.distance = gauge_residuals(out.gateset, target, options.spam_weight).norm();
    out.converged = fit.converged;
    return out;
}

}  // namespace donorsim::gst
