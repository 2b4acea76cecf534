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

#include "donorsim/gst/lindblad.h"

#include <map>
#include <mutex>
#include <stdexcept>

namespace donorsim::gst {

ErrorGenerator ErrorGenerator::zero(int num_qubits) {
    const int n = (1 << (2 * num_qubits)) - 1;
    return {RVector::Zero(n), RVector::Zero(n)};
}

namespace {

struct GeneratorCache {
    std::vector<RMatrix> ham;
    std::vector<RMatrix> sto;
    /// Maps the stochastic rates onto the PTM diagonal (non-identity entries).
    Eigen::PartialPivLU<RMatrix> diag_solver;
};

const GeneratorCache &cache(int num_qubits) {
    static std::mutex mu;
    static std::map<int, GeneratorCache> all;
    std::lock_guard<std::mutex> lock(mu);
    auto it = all.find(num_qubits);
    if (it != all.end()) return it->second;
    const int dim = 1 << num_qubits;
    const auto &basis = pauli_basis(num_qubits);
    GeneratorCache c;
    const int n = static_cast<int>(basis.size());
    RMatrix a(n - 1, n - 1);
    for (int p = 0; p < n; ++p) {
        const CMatrix &pp = basis[p];
        c.ham.push_back(ptm_from_map([&](const CMatrix &x) { return CMatrix(-kI * 0.5 * (pp * x - x * pp)); }, dim));
        c.sto.push_back(ptm_from_map([&](const CMatrix &x) { return CMatrix(pp * x * pp - x); }, dim));
        if (p > 0) {
            a.col(p - 1) = c.sto.back().diagonal().tail(n - 1);
        }
    }
    c.diag_solver = Eigen::PartialPivLU<RMatrix>(a);
    return all.emplace(num_qubits, std::move(c)).first->second;
}

}  // namespace

const RMatrix &hamiltonian_generator(int num_qubits, int pauli) { return cache(num_qubits).ham.at(pauli); }

const RMatrix &stochastic_generator(int num_qubits, int pauli) { return cache(num_qubits).sto.at(pauli); }

RMatrix generator_matrix(const ErrorGenerator &gen, int num_qubits) {
    const auto &c = cache(num_qubits);
    const int n = static_cast<int>(c.ham.size());
    RMatrix out = RMatrix::Zero(n, n);
    for (int p = 1; p < n; ++p) {
        out += gen.h(p - 1) * c.ham[p] + gen.s(p - 1) * c.sto[p];
    }
    return out;
}

ErrorGenerator project_generator(const RMatrix &generator, int num_qubits) {
    const auto &c = cache(num_qubits);
    const int n = static_cast<int>(c.ham.size());
    if (generator.rows() != n || generator.cols() != n) {
        throw std::invalid_argument("generator has the wrong dimension");
    }
    ErrorGenerator out = ErrorGenerator::zero(num_qubits);
    for (int p = 1; p < n; ++p) {
        const RMatrix &hp = c.ham[p];
        out.h(p - 1) = (hp.array() * generator.array()).sum() / hp.squaredNorm();
    }
    out.s = c.diag_solver.solve(RVector(generator.diagonal().tail(n - 1)));
    return out;
}

RMatrix error_generator(const RMatrix &gate, const RMatrix &target) {
    const RMatrix e = gate * target.inverse();
    Eigen::EigenSolver<RMatrix> es(e, false);
    for (int k = 0; k < es.eigenvalues().size(); ++k) {
        const Complex z = es.eigenvalues()(k);
        if (std::abs(z.imag()) < 1e-12 && z.real() <= 0.0) {
            throw std::domain_error("error generator has no real principal logarithm");
        }
    }
    RMatrix l = real_log(e);
    if (!l.allFinite()) {
        throw std::domain_error("error generator logarithm is not real and finite");
    }
    return l;
}

std::string pauli_name(int num_qubits, int pauli) {
    static const char names[] = {'I', 'X', 'Y', 'Z'};
    std::string out;
    for (int q = num_qubits - 1; q >= 0; --q) {
        out += names[(pauli >> (2 * q)) & 3];
    }
    return out;
}

}  // namespace donorsim::gst
