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

#ifndef DONORSIM_SPIN_MODEL_H
#define DONORSIM_SPIN_MODEL_H

#include <array>
#include <string>
#include <vector>

#include "donorsim/linalg.h"

namespace donorsim {

/// Bohr magneton over Planck constant in MHz/T.
inline constexpr double kBohrMagnetonMHzPerT = 13996.24493;

/// Physical constants and couplings of the two-donor system. Frequencies in MHz.
struct SpinSystemParams {
    double b0_tesla = 1.0;
    double g1 = 1.9985;
    double g2 = 1.9985;
    double a1_mhz = 112.0;
    double a2_mhz = 112.0;
    double j_mhz = 12.0;
    double gamma_n_mhz_per_t = 17.23;

    double abar_mhz() const { return 0.5 * (a1_mhz + a2_mhz); }
    /// True when J < Abar. Violations are allowed but should be surfaced as warnings.
    bool weak_exchange() const { return j_mhz < abar_mhz(); }
    /// Throws std::invalid_argument on b0 <= 0, a1/a2 < 0, j < 0 or non-finite values.
    void validate() const;
};

enum class NuclearSpin { Down, Up };

struct NuclearConfig {
    NuclearSpin n1 = NuclearSpin::Up;
    NuclearSpin n2 = NuclearSpin::Down;

    bool anti_parallel() const { return n1 != n2; }
    static NuclearConfig parse(const std::string &text);
    std::string str() const;
};

/// Electron resonance frequency for qubit 1 or 2 including the +-A/2 shift of its
/// nucleus (nuclear Up shifts up by +A/2).
double electron_frequency(const SpinSystemParams &p, int qubit, NuclearConfig nucs);

/// 16x16 Hamiltonian in the order e1 (x) e2 (x) n1 (x) n2, each factor (down, up).
Operator build_full_hamiltonian(const SpinSystemParams &p);

/// 4x4 two-electron Hamiltonian nu1 Sz1 + nu2 Sz2 + J S1.S2 with frozen nuclei,
/// in the Sz product basis |dd>, |du>, |ud>, |uu> (Q1 is the first factor).
Operator effective_electron_hamiltonian(const SpinSystemParams &p, NuclearConfig nucs);

/// theta = atan(J / Abar) / 2. Throws std::domain_error when abar == 0.
double mixing_angle(double j_mhz, double abar_mhz);

/// Two-electron eigenstates in Table-I order: |dd>, ~|du>, ~|ud>, |uu>.
/// For the |Up1 Down2> configuration this order is ascending in energy.
struct EigenSolution {
    std::array<double, 4> energies{};
    /// Columns are the logical states expressed in the Sz product basis.
    CMatrix states;
    double theta = 0.0;
};

EigenSolution eigenstates(const SpinSystemParams &p, NuclearConfig nucs);

/// Single-electron-flip transition frequencies between the eigen levels.
struct EsrLines {
    double q1_c_down = 0.0;  // |dd> -> ~|ud>
    double q1_c_up = 0.0;    // ~|du> -> |uu>
    double q2_c_down = 0.0;  // |dd> -> ~|du>
    double q2_c_up = 0.0;    // ~|ud> -> |uu>

    std::array<double, 4> as_array() const { return {q1_c_down, q1_c_up, q2_c_down, q2_c_up}; }
};

EsrLines esr_frequencies(const SpinSystemParams &p, NuclearConfig nucs);

/// Same four lines taken from the full 16-dim model, identifying each electron
/// level by its overlap with the frozen-nuclei eigenstates.
EsrLines esr_frequencies_full(const SpinSystemParams &p, NuclearConfig nucs);

/// Logical level indices (lower, upper) of an ESR line for `target` qubit (1 or 2)
/// conditioned on the other electron being up or down.
std::array<int, 2> line_levels(int target, bool control_up);

}  // namespace donorsim

#endif
