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

#ifndef DONORSIM_LINALG_H
#define DONORSIM_LINALG_H

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace donorsim {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Hermitian operator in frequency units (MHz) unless stated otherwise.
using Operator = CMatrix;
using Unitary = CMatrix;
/// Density matrix in the logical (eigen) basis of the two electrons.
using DensityMatrix = CMatrix;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr Complex kI{0.0, 1.0};

// Single spin-1/2 operators in the (|down>, |up>) ordering. Index 0 is |down>.
CMatrix spin_x();
CMatrix spin_y();
CMatrix spin_z();
CMatrix identity(int dim);

/// Pauli matrices with X = 2 Sx, Y = 2 Sy, Z = 2 Sz in the (|down>, |up>) ordering,
/// indexed 0..3 as I, X, Y, Z.
CMatrix pauli(int index);

CMatrix kron(const CMatrix &a, const CMatrix &b);
CMatrix kron(const std::vector<CMatrix> &factors);

/// Embeds `op` acting on subsystem `site` into the tensor product with local dims `dims`.
CMatrix embed(const CMatrix &op, int site, const std::vector<int> &dims);

CMatrix dagger(const CMatrix &m);

bool is_hermitian(const CMatrix &m, double tol);
/// Operator (spectral) norm of U^dagger U - I.
double unitarity_error(const CMatrix &u);
/// Smallest eigenvalue of the Hermitian part.
double min_eigenvalue(const CMatrix &m);

/// exp(-2 pi i H t) for Hermitian H in MHz and t in microseconds.
Unitary evolve(const Operator &h, double t_us);

/// Tensor-product Pauli basis for n qubits, qubit 1 is the most significant factor.
/// Element k has base-4 digits (p1, p2, ...) giving the Pauli index on each qubit.
const std::vector<CMatrix> &pauli_basis(int num_qubits);

int num_qubits_for_dim(int dim);

// Pauli transfer matrix (PTM) helpers. PTM coordinates use the normalized basis
// P_k / sqrt(d), so states map to real vectors with first entry 1/sqrt(d).
RVector state_to_ptm(const CMatrix &rho);
CMatrix ptm_to_state(const RVector &v);
CVector operator_to_ptm(const CMatrix &x);
CMatrix ptm_to_operator(const CVector &v);

RMatrix ptm_from_unitary(const CMatrix &u);
RMatrix ptm_from_kraus(const std::vector<CMatrix> &kraus);
RMatrix ptm_from_map(const std::function<CMatrix(const CMatrix &)> &map, int dim);

/// Choi matrix sum_ab |a><b| (x) G(|a><b|) / d; PSD iff the map is completely positive.
CMatrix choi_from_ptm(const RMatrix &ptm);

/// Euclidean projection of a vector onto the probability simplex.
RVector project_to_simplex(const RVector &v);
/// Frobenius-nearest PSD unit-trace matrix (eigenvalue projection onto the simplex).
/// The input is Hermitian-symmetrized first.
DensityMatrix nearest_physical(const DensityMatrix &rho);

RMatrix real_exp(const RMatrix &m);
RMatrix real_log(const RMatrix &m);
/// Frechet derivative of the matrix exponential at `m` in direction `dir`.
RMatrix exp_frechet(const RMatrix &m, const RMatrix &dir);

}  // namespace donorsim

#endif
