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

#ifndef DONORSIM_GST_LINDBLAD_H
#define DONORSIM_GST_LINDBLAD_H

#include <string>

#include "donorsim/linalg.h"

namespace donorsim::gst {

/// Hamiltonian (h) and Pauli-stochastic (s) rates indexed by non-identity Pauli
/// index - 1. A rate h_P rotates by h_P radians about P; s_P is the generator
/// weight of rho -> P rho P - rho.
struct ErrorGenerator {
    RVector h;
    RVector s;

    static ErrorGenerator zero(int num_qubits);
};

/// PTM of rho -> -i [P / 2, rho].
const RMatrix &hamiltonian_generator(int num_qubits, int pauli);
/// PTM of rho -> P rho P - rho.
const RMatrix &stochastic_generator(int num_qubits, int pauli);

RMatrix generator_matrix(const ErrorGenerator &gen, int num_qubits);
/// Orthogonal projection of a generator onto the Hamiltonian and
/// Pauli-stochastic subspaces.
ErrorGenerator project_generator(const RMatrix &generator, int num_qubits);

/// Post-gate error generator log(G T^-1) on the principal branch. Throws
/// std::domain_error when the logarithm is not real and finite.
RMatrix error_generator(const RMatrix &gate, const RMatrix &target);

/// "X", "ZI", ... with Q1 first.
std::string pauli_name(int num_qubits, int pauli);

}  // namespace donorsim::gst

#endif
