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

#include "donorsim/spin_model.h"

#include <cmath>
#include <stdexcept>

namespace donorsim {

namespace {

double nuclear_sign(NuclearSpin s) {
    return s == NuclearSpin::Up ? 1.0 : -1.0;
}

}  // namespace

void SpinSystemParams::validate() const {
    for (double v : {b0_tesla, g1, g2, a1_mhz, a2_mhz, j_mhz, gamma_n_mhz_per_t}) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("spin parameters must be finite");
        }
    }
    if (b0_tesla <= 0.0) {
        throw std::invalid_argument("b0 must be positive");
    }
    if (a1_mhz < 0.0 || a2_mhz < 0.0) {
        throw std::invalid_argument("hyperfine couplings a1, a2 must be non-negative");
    }
    if (j_mhz < 0.0) {
        throw std::invalid_argument("exchange j must be non-negative");
    }
}

NuclearConfig NuclearConfig::parse(const std::string &text) {
    if (text.size() != 2) {
        throw std::invalid_argument("nuclear config must be two characters from {u,d}: " + text);
    }
    auto one = [&](char c) {
        if (c == 'u' || c == 'U') return NuclearSpin::Up;
        if (c == 'd' || c == 'D') return NuclearSpin::Down;
        throw std::invalid_argument("nuclear config must be two characters from {u,d}: " + text);
    };
    return NuclearConfig{one(text[0]), one(text[1])};
}

std::string NuclearConfig::str() const {
    std::string s;
    s += n1 == NuclearSpin::Up ? 'u' : 'd';
    s += n2 == NuclearSpin::Up ? 'u' : 'd';
    return s;
}

double electron_frequency(const SpinSystemParams &p, int qubit, NuclearConfig nucs) {
    if (qubit == 1) {
        return kBohrMagnetonMHzPerT * p.b0_tesla * p.g1 + 0.5 * p.a1_mhz * nuclear_sign(nucs.n1);
    }
    if (qubit == 2) {
        return kBohrMagnetonMHzPerT * p.b0_tesla * p.g2 + 0.5 * p.a2_mhz * nuclear_sign(nucs.n2);
    }
    throw std::invalid_argument("qubit must be 1 or 2");
}

Operator build_full_hamiltonian(const SpinSystemParams &p) {
    p.validate();
    const std::vector<int> dims{2, 2, 2, 2};
    const CMatrix sx = spin_x(), sy = spin_y(), sz = spin_z();
    auto op = [&](const CMatrix &m, int site) { return embed(m, site, dims); };
    auto dot = [&](int a, int b) {
        return CMatrix(op(sx, a) * op(sx, b) + op(sy, a) * op(sy, b) + op(sz, a) * op(sz, b));
    };
    const double e_zeeman = kBohrMagnetonMHzPerT * p.b0_tesla;
    Operator h = e_zeeman * (p.g1 * op(sz, 0) + p.g2 * op(sz, 1));
    h += p.gamma_n_mhz_per_t * p.b0_tesla * (op(sz, 2) + op(sz, 3));
    h += p.a1_mhz * dot(0, 2) + p.a2_mhz * dot(1, 3);
    h += p.j_mhz * dot(0, 1);
    return h;
}

Operator effective_electron_hamiltonian(const SpinSystemParams &p, NuclearConfig nucs) {
    p.validate();
    const std::vector<int> dims{2, 2};
    const CMatrix sx = spin_x(), sy = spin_y(), sz = spin_z();
    auto op = [&](const CMatrix &m, int site) { return embed(m, site, dims); };
    Operator h = electron_frequency(p, 1, nucs) * op(sz, 0) + electron_frequency(p, 2, nucs) * op(sz, 1);
    h += p.j_mhz * (op(sx, 0) * op(sx, 1) + op(sy, 0) * op(sy, 1) + op(sz, 0) * op(sz, 1));
    return h;
}

double mixing_angle(double j_mhz, double abar_mhz) {
    if (abar_mhz == 0.0) {
        throw std::domain_error("mixing angle undefined for zero average hyperfine");
    }
    if (abar_mhz < 0.0 || j_mhz < 0.0) {
        throw std::domain_error("mixing angle requires abar > 0 and j >= 0");
    }
    return 0.5 * std::atan(j_mhz / abar_mhz);
}

EigenSolution eigenstates(const SpinSystemParams &p, NuclearConfig nucs) {
    const double nu1 = electron_frequency(p, 1, nucs);
    const double nu2 = electron_frequency(p, 2, nucs);
    const double j = p.j_mhz;

    EigenSolution sol;
    sol.states = CMatrix::Zero(4, 4);
    sol.states(0, 0) = 1.0;
    sol.states(3, 3) = 1.0;
    sol.energies[0] = -0.5 * (nu1 + nu2) + 0.25 * j;
    sol.energies[3] = 0.5 * (nu1 + nu2) + 0.25 * j;

    // Middle block in the (|du>, |ud>) basis. With J > 0 the flip-flop element is +J/2,
    // so the exact eigenvectors are cos|du> - sin|ud> and cos|ud> + sin|du>; the sign of
    // the admixture is a basis-phase convention and only |overlaps| are physical.
    const double delta = nu1 - nu2;
    Eigen::Matrix2d block;
    block << -0.5 * delta - 0.25 * j, 0.5 * j, 0.5 * j, 0.5 * delta - 0.25 * j;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(block);
    Eigen::Vector2d e0 = es.eigenvectors().col(0), e1 = es.eigenvectors().col(1);
    // Assign by overlap with |du>; exact ties (delta == 0) fall back to energy order.
    bool first_is_du = std::abs(e0(0)) >= std::abs(e1(0)) - 1e-15;
    Eigen::Vector2d du = first_is_du ? e0 : e1;
    Eigen::Vector2d ud = first_is_du ? e1 : e0;
    double e_du = first_is_du ? es.eigenvalues()(0) : es.eigenvalues()(1);
    double e_ud = first_is_du ? es.eigenvalues()(1) : es.eigenvalues()(0);
    if (du(0) < 0) du = -du;
    if (ud(1) < 0) ud = -ud;
    sol.states(1, 1) = du(0);
    sol.states(2, 1) = du(1);
    sol.states(1, 2) = ud(0);
    sol.states(2, 2) = ud(1);
    sol.energies[1] = e_du;
    sol.energies[2] = e_ud;
    sol.theta = std::atan2(std::abs(du(1)), std::abs(du(0)));
    return sol;
}

std::array<int, 2> line_levels(int target, bool control_up) {
    // Logical index = 2 * q1 + q2 with down = 0.
    if (target == 1) {
        return control_up ? std::array<int, 2>{1, 3} : std::array<int, 2>{0, 2};
    }
    if (target == 2) {
        return control_up ? std::array<int, 2>{2, 3} : std::array<int, 2>{0, 1};
    }
    throw std::invalid_argument("target must be 1 or 2");
}

EsrLines esr_frequencies(const SpinSystemParams &p, NuclearConfig nucs) {
    EigenSolution sol = eigenstates(p, nucs);
    auto line = [&](int target, bool up) {
        auto lv = line_levels(target, up);
        return sol.energies[lv[1]] - sol.energies[lv[0]];
    };
    return EsrLines{line(1, false), line(1, true), line(2, false), line(2, true)};
}

EsrLines esr_frequencies_full(const SpinSystemParams &p, NuclearConfig nucs) {
    Operator h = build_full_hamiltonian(p);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    EigenSolution eff = eigenstates(p, nucs);
    CVector nuc(4);
    nuc.setZero();
    int nuc_index = (nucs.n1 == NuclearSpin::Up ? 2 : 0) + (nucs.n2 == NuclearSpin::Up ? 1 : 0);
    nuc(nuc_index) = 1.0;
    std::array<double, 4> energies{};
    for (int k = 0; k < 4; ++k) {
        CVector ref = kron(CMatrix(eff.states.col(k)), CMatrix(nuc));
        Eigen::Index best = 0;
        double best_overlap = -1.0;
        for (Eigen::Index m = 0; m < es.eigenvectors().cols(); ++m) {
            double ov = std::abs(ref.dot(es.eigenvectors().col(m)));
            if (ov > best_overlap) {
                best_overlap = ov;
                best = m;
            }
        }
        energies[k] = es.eigenvalues()(best);
    }
    auto line = [&](int target, bool up) {
        auto lv = line_levels(target, up);
        return energies[lv[1]] - energies[lv[0]];
    };
    return EsrLines{line(1, false), line(1, true), line(2, false), line(2, true)};
}

}  // namespace donorsim
