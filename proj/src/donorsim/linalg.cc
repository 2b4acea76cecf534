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

#include "donorsim/linalg.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

namespace donorsim {

CMatrix spin_x() {
    CMatrix m(2, 2);
    m << 0.0, 0.5, 0.5, 0.0;
    return m;
}

CMatrix spin_y() {
    CMatrix m(2, 2);
    m << 0.0, 0.5 * kI, -0.5 * kI, 0.0;
    return m;
}

CMatrix spin_z() {
    CMatrix m(2, 2);
    m << -0.5, 0.0, 0.0, 0.5;
    return m;
}

CMatrix identity(int dim) {
    return CMatrix::Identity(dim, dim);
}

CMatrix pauli(int index) {
    switch (index) {
        case 0:
            return identity(2);
        case 1:
            return 2.0 * spin_x();
        case 2:
            return 2.0 * spin_y();
        case 3:
            return 2.0 * spin_z();
        default:
            throw std::out_of_range("pauli index must be in 0..3");
    }
}

CMatrix kron(const CMatrix &a, const CMatrix &b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

CMatrix kron(const std::vector<CMatrix> &factors) {
    CMatrix out = CMatrix::Identity(1, 1);
    for (const auto &f : factors) {
        out = kron(out, f);
    }
    return out;
}

CMatrix embed(const CMatrix &op, int site, const std::vector<int> &dims) {
    std::vector<CMatrix> factors;
    factors.reserve(dims.size());
    for (size_t k = 0; k < dims.size(); ++k) {
        if (static_cast<int>(k) == site) {
            if (op.rows() != dims[k]) {
                throw std::invalid_argument("embed: operator dimension does not match site");
            }
            factors.push_back(op);
        } else {
            factors.push_back(identity(dims[k]));
        }
    }
    return kron(factors);
}

CMatrix dagger(const CMatrix &m) {
    return m.adjoint();
}

bool is_hermitian(const CMatrix &m, double tol) {
    if (m.rows() != m.cols()) {
        return false;
    }
    double scale = std::max(1.0, m.norm());
    return (m - m.adjoint()).norm() <= tol * scale;
}

double unitarity_error(const CMatrix &u) {
    CMatrix d = u.adjoint() * u - CMatrix::Identity(u.cols(), u.cols());
    Eigen::JacobiSVD<CMatrix> svd(d);
    return svd.singularValues()(0);
}

double min_eigenvalue(const CMatrix &m) {
    CMatrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

Unitary evolve(const Operator &h, double t_us) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (h + h.adjoint()));
    CVector phases = (-kI * kTwoPi * t_us * es.eigenvalues().cast<Complex>()).array().exp();
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

int num_qubits_for_dim(int dim) {
    int n = 0;
    while ((1 << n) < dim) {
        ++n;
    }
    if ((1 << n) != dim) {
        throw std::invalid_argument("dimension is not a power of two");
    }
    return n;
}

const std::vector<CMatrix> &pauli_basis(int num_qubits) {
    static std::mutex mu;
    static std::map<int, std::vector<CMatrix>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(num_qubits);
    if (it != cache.end()) {
        return it->second;
    }
    std::vector<CMatrix> basis;
    int count = 1 << (2 * num_qubits);
    basis.reserve(count);
    for (int k = 0; k < count; ++k) {
        std::vector<CMatrix> factors;
        for (int q = num_qubits - 1; q >= 0; --q) {
            factors.push_back(pauli((k >> (2 * q)) & 3));
        }
        basis.push_back(kron(factors));
    }
    return cache.emplace(num_qubits, std::move(basis)).first->second;
}

CVector operator_to_ptm(const CMatrix &x) {
    int dim = static_cast<int>(x.rows());
    const auto &basis = pauli_basis(num_qubits_for_dim(dim));
    double norm = std::sqrt(static_cast<double>(dim));
    CVector v(basis.size());
    for (size_t k = 0; k < basis.size(); ++k) {
        v(k) = (basis[k] * x).trace() / norm;
    }
    return v;
}

CMatrix ptm_to_operator(const CVector &v) {
    int d2 = static_cast<int>(v.size());
    int dim = static_cast<int>(std::lround(std::sqrt(static_cast<double>(d2))));
    const auto &basis = pauli_basis(num_qubits_for_dim(dim));
    double norm = std::sqrt(static_cast<double>(dim));
    CMatrix x = CMatrix::Zero(dim, dim);
    for (int k = 0; k < d2; ++k) {
        x += v(k) * basis[k] / norm;
    }
    return x;
}

RVector state_to_ptm(const CMatrix &rho) {
    return operator_to_ptm(rho).real();
}

CMatrix ptm_to_state(const RVector &v) {
    return ptm_to_operator(v.cast<Complex>());
}

RMatrix ptm_from_map(const std::function<CMatrix(const CMatrix &)> &map, int dim) {
    const auto &basis = pauli_basis(num_qubits_for_dim(dim));
    int d2 = static_cast<int>(basis.size());
    RMatrix g(d2, d2);
    for (int j = 0; j < d2; ++j) {
        CMatrix out = map(basis[j]);
        for (int i = 0; i < d2; ++i) {
            g(i, j) = (basis[i] * out).trace().real() / dim;
        }
    }
    return g;
}

RMatrix ptm_from_unitary(const CMatrix &u) {
    return ptm_from_map([&](const CMatrix &x) { return CMatrix(u * x * u.adjoint()); },
                        static_cast<int>(u.rows()));
}

RMatrix ptm_from_kraus(const std::vector<CMatrix> &kraus) {
    if (kraus.empty()) {
        throw std::invalid_argument("empty Kraus set");
    }
    return ptm_from_map(
        [&](const CMatrix &x) {
            CMatrix out = CMatrix::Zero(x.rows(), x.cols());
            for (const auto &k : kraus) {
                out += k * x * k.adjoint();
            }
            return out;
        },
        static_cast<int>(kraus.front().rows()));
}

CMatrix choi_from_ptm(const RMatrix &ptm) {
    int d2 = static_cast<int>(ptm.rows());
    int dim = static_cast<int>(std::lround(std::sqrt(static_cast<double>(d2))));
    CMatrix choi = CMatrix::Zero(d2, d2);
    for (int a = 0; a < dim; ++a) {
        for (int b = 0; b < dim; ++b) {
            CMatrix eab = CMatrix::Zero(dim, dim);
            eab(a, b) = 1.0;
            CMatrix out = ptm_to_operator(ptm.cast<Complex>() * operator_to_ptm(eab));
            choi.block(a * dim, b * dim, dim, dim) = out / static_cast<double>(dim);
        }
    }
    return choi;
}

RMatrix real_exp(const RMatrix &m) {
    return m.exp();
}

RMatrix real_log(const RMatrix &m) {
    RMatrix out = m.log();
    return out;
}

RMatrix exp_frechet(const RMatrix &m, const RMatrix &dir) {
    Eigen::Index n = m.rows();
    RMatrix block = RMatrix::Zero(2 * n, 2 * n);
    block.topLeftCorner(n, n) = m;
    block.bottomRightCorner(n, n) = m;
    block.topRightCorner(n, n) = dir;
    RMatrix e = block.exp();
    return e.topRightCorner(n, n);
}

RVector project_to_simplex(const RVector &v) {
    const int n = static_cast<int>(v.size());
    std::vector<double> u(v.data(), v.data() + n);
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumulative = 0.0, tau = 0.0;
    for (int k = 0; k < n; ++k) {
        cumulative += u[k];
        double t = (cumulative - 1.0) / (k + 1);
        if (u[k] - t > 0.0) {
            tau = t;
        }
    }
    RVector out(n);
    for (int k = 0; k < n; ++k) {
        out(k) = std::max(v(k) - tau, 0.0);
    }
    return out;
}

DensityMatrix nearest_physical(const DensityMatrix &rho) {
    CMatrix h = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    RVector lam = project_to_simplex(es.eigenvalues());
    return es.eigenvectors() * lam.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace donorsim
