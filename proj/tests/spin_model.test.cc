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

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

#include "gtest/gtest.h"

using namespace donorsim;

namespace {

// Oracle operators built directly from matrix elements, independent of linalg.
Eigen::Matrix2cd sx() {
    Eigen::Matrix2cd m;
    m << 0, 0.5, 0.5, 0;
    return m;
}
Eigen::Matrix2cd sy() {
    Eigen::Matrix2cd m;
    m << 0, Complex(0, 0.5), Complex(0, -0.5), 0;
    return m;
}
Eigen::Matrix2cd sz() {
    Eigen::Matrix2cd m;
    m << -0.5, 0, 0, 0.5;
    return m;
}

Eigen::MatrixXcd site(const Eigen::Matrix2cd &op, int k, int n) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
    for (int i = 0; i < n; ++i) {
        Eigen::MatrixXcd f = i == k ? Eigen::MatrixXcd(op) : Eigen::MatrixXcd::Identity(2, 2);
        out = Eigen::kroneckerProduct(out, f).eval();
    }
    return out;
}

Eigen::MatrixXcd oracle_full(const SpinSystemParams &p) {
    const double mu = 13996.24493;
    auto dot = [](int a, int b) -> Eigen::MatrixXcd {
        return site(sx(), a, 4) * site(sx(), b, 4) + site(sy(), a, 4) * site(sy(), b, 4) +
               site(sz(), a, 4) * site(sz(), b, 4);
    };
    Eigen::MatrixXcd h = mu * p.b0_tesla * (p.g1 * site(sz(), 0, 4) + p.g2 * site(sz(), 1, 4));
    h += p.gamma_n_mhz_per_t * p.b0_tesla * (site(sz(), 2, 4) + site(sz(), 3, 4));
    h += p.a1_mhz * dot(0, 2) + p.a2_mhz * dot(1, 3) + p.j_mhz * dot(0, 1);
    return h;
}

Eigen::MatrixXcd oracle_effective(double nu1, double nu2, double j) {
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(4, 4);
    h(0, 0) = -0.5 * (nu1 + nu2) + j / 4;
    h(1, 1) = 0.5 * (nu2 - nu1) - j / 4;
    h(2, 2) = 0.5 * (nu1 - nu2) - j / 4;
    h(3, 3) = 0.5 * (nu1 + nu2) + j / 4;
    h(1, 2) = h(2, 1) = j / 2;
    return h;
}

// Lines from energy differences of a dense eigensolve, levels labelled by largest
// overlap with the product states.
std::array<double, 4> oracle_lines(double nu1, double nu2, double j) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(oracle_effective(nu1, nu2, j));
    double e[4];
    for (int k = 0; k < 4; ++k) {
        int best = 0;
        for (int m = 1; m < 4; ++m) {
            if (std::abs(es.eigenvectors()(k, m)) > std::abs(es.eigenvectors()(k, best))) best = m;
        }
        e[k] = es.eigenvalues()(best);
    }
    return {e[2] - e[0], e[3] - e[1], e[1] - e[0], e[3] - e[2]};
}

}  // namespace

TEST(spin_model, mixing_angle_values) {
    double th = mixing_angle(12.0, 112.0);
    EXPECT_NEAR(th, 0.053367, 1e-6);
    EXPECT_NEAR(std::cos(th), 0.9986, 1e-4);
    EXPECT_EQ(mixing_angle(0.0, 112.0), 0.0);
    EXPECT_NEAR(mixing_angle(112.0, 112.0), kPi / 8, 1e-15);
    EXPECT_THROW(mixing_angle(12.0, 0.0), std::domain_error);
}

TEST(spin_model, mixing_angle_monotone) {
    double prev = -1.0;
    for (double j = 0.0; j <= 500.0; j += 5.0) {
        double th = mixing_angle(j, 112.0);
        EXPECT_GT(th, prev);
        EXPECT_LT(th, kPi / 4);
        prev = th;
    }
    EXPECT_LT(mixing_angle(1e-6, 112.0), 1e-8);
}

TEST(spin_model, params_validation) {
    SpinSystemParams p;
    EXPECT_NO_THROW(p.validate());
    EXPECT_DOUBLE_EQ(p.abar_mhz(), 112.0);
    EXPECT_TRUE(p.weak_exchange());
    p.j_mhz = 200.0;
    EXPECT_NO_THROW(p.validate());
    EXPECT_FALSE(p.weak_exchange());
    p = {};
    p.b0_tesla = 0.0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = {};
    p.a1_mhz = -1.0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = {};
    p.j_mhz = -0.1;
    EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(spin_model, full_hamiltonian_hermitian_traceless) {
    SpinSystemParams p;
    Operator h = build_full_hamiltonian(p);
    ASSERT_EQ(h.rows(), 16);
    EXPECT_LT((h - h.adjoint()).norm(), 1e-12 * h.norm());
    EXPECT_LT(std::abs(h.trace()), 1e-9);
}

TEST(spin_model, full_hamiltonian_uncoupled_is_diagonal) {
    SpinSystemParams p;
    p.a1_mhz = p.a2_mhz = 0.0;
    p.j_mhz = 0.0;
    Operator h = build_full_hamiltonian(p);
    Operator off = h;
    off.diagonal().setZero();
    EXPECT_EQ(off.norm(), 0.0);
}

TEST(spin_model, full_hamiltonian_matches_dense_oracle) {
    SpinSystemParams p;
    Operator h = build_full_hamiltonian(p);
    Eigen::MatrixXcd ho = oracle_full(p);
    EXPECT_LT((h - ho).norm(), 1e-9);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> a(h), b(ho);
    for (int k = 0; k < 16; ++k) {
        EXPECT_NEAR(a.eigenvalues()(k), b.eigenvalues()(k), 1e-9);
    }
}

TEST(spin_model, full_hamiltonian_secular_structure) {
    SpinSystemParams p;
    Operator h = build_full_hamiltonian(p);
    Eigen::MatrixXcd mz = Eigen::MatrixXcd::Zero(16, 16);
    for (int k = 0; k < 4; ++k) mz += site(sz(), k, 4);
    EXPECT_LT((h * mz - mz * h).norm(), 1e-10);
}

TEST(spin_model, effective_detuning_equals_abar) {
    SpinSystemParams p;
    NuclearConfig nucs;
    EXPECT_NEAR(electron_frequency(p, 1, nucs) - electron_frequency(p, 2, nucs), 112.0, 1e-9);
    NuclearConfig par = NuclearConfig::parse("uu");
    EXPECT_NEAR(electron_frequency(p, 1, par), electron_frequency(p, 2, par), 1e-9);
    Operator h = effective_electron_hamiltonian(p, nucs);
    Eigen::MatrixXcd ho =
        oracle_effective(electron_frequency(p, 1, nucs), electron_frequency(p, 2, nucs), p.j_mhz);
    EXPECT_LT((h - ho).norm(), 1e-9);
}

TEST(spin_model, nuclear_config_parse) {
    EXPECT_EQ(NuclearConfig::parse("ud").str(), "ud");
    EXPECT_EQ(NuclearConfig::parse("du").str(), "du");
    EXPECT_TRUE(NuclearConfig{}.anti_parallel());
    EXPECT_THROW(NuclearConfig::parse("x"), std::invalid_argument);
}

TEST(spin_model, effective_matches_full_block_to_first_order) {
    SpinSystemParams p;
    NuclearConfig nucs;
    EigenSolution es = eigenstates(p, nucs);
    // Oracle: project the dense 16-dim Hamiltonian onto the frozen-nuclei block.
    Eigen::MatrixXcd hf = oracle_full(p);
    int n_index = 2 * (nucs.n1 == NuclearSpin::Up) + (nucs.n2 == NuclearSpin::Up);
    Eigen::MatrixXcd block(4, 4);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) block(a, b) = hf(4 * a + n_index, 4 * b + n_index);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> sol(block);
    std::array<double, 4> sorted = es.energies;
    std::sort(sorted.begin(), sorted.end());
    const double shift = block.trace().real() / 4.0;
    for (int k = 0; k < 4; ++k) {
        EXPECT_NEAR(sorted[k] + shift, sol.eigenvalues()(k), p.j_mhz * p.j_mhz / p.abar_mhz());
    }
}

TEST(spin_model, eigenstates_product_at_zero_exchange) {
    SpinSystemParams p;
    p.j_mhz = 0.0;
    EigenSolution es = eigenstates(p, {});
    EXPECT_LT((es.states - CMatrix::Identity(4, 4)).norm(), 1e-12);
    EXPECT_EQ(es.theta, 0.0);
}

TEST(spin_model, eigenstates_default) {
    SpinSystemParams p;
    EigenSolution es = eigenstates(p, {});
    EXPECT_LT((es.states.adjoint() * es.states - CMatrix::Identity(4, 4)).norm(), 1e-10);
    EXPECT_NEAR(std::abs(es.states(1, 1)), 0.9986, 1e-4);
    EXPECT_NEAR(std::abs(es.states(1, 1)), std::cos(mixing_angle(12.0, 112.0)), 1e-12);
    EXPECT_NEAR(es.theta, mixing_angle(12.0, 112.0), 1e-12);
    for (int k = 0; k + 1 < 4; ++k) EXPECT_LT(es.energies[k], es.energies[k + 1]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> o(
        oracle_effective(electron_frequency(p, 1, {}), electron_frequency(p, 2, {}), p.j_mhz));
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(es.energies[k], o.eigenvalues()(k), 1e-9);
}

TEST(spin_model, pure_zeeman_states_exact_for_all_j) {
    for (double j : {0.0, 1.0, 12.0, 80.0, 300.0}) {
        SpinSystemParams p;
        p.j_mhz = j;
        Operator h = effective_electron_hamiltonian(p, {});
        for (int k : {0, 3}) {
            CVector v = CVector::Zero(4);
            v(k) = 1.0;
            CVector hv = h * v;
            Complex e = v.dot(hv);
            EXPECT_LT((hv - e * v).norm(), 1e-10);
        }
    }
}

TEST(spin_model, esr_lines_degenerate_without_exchange) {
    SpinSystemParams p;
    p.j_mhz = 0.0;
    EsrLines l = esr_frequencies(p, {});
    EXPECT_NEAR(l.q1_c_down, l.q1_c_up, 1e-9);
    EXPECT_NEAR(l.q2_c_down, l.q2_c_up, 1e-9);
    EXPECT_NEAR(l.q1_c_down, electron_frequency(p, 1, {}), 1e-9);
    EXPECT_NEAR(l.q2_c_down, electron_frequency(p, 2, {}), 1e-9);
}

TEST(spin_model, esr_lines_match_energy_difference_oracle) {
    SpinSystemParams p;
    EsrLines l = esr_frequencies(p, {});
    auto o = oracle_lines(electron_frequency(p, 1, {}), electron_frequency(p, 2, {}), p.j_mhz);
    auto a = l.as_array();
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(a[k], o[k], 1e-9);
    EXPECT_NEAR(l.q1_c_up - l.q1_c_down, 12.0, 0.5);
    EXPECT_NEAR(l.q2_c_up - l.q2_c_down, 12.0, 0.5);
    double sep = 0.5 * (l.q1_c_down + l.q1_c_up) - 0.5 * (l.q2_c_down + l.q2_c_up);
    EXPECT_NEAR(sep, 112.0, 112.0 * std::pow(12.0 / 112.0, 2));
}

TEST(spin_model, esr_lines_effective_vs_full_model) {
    SpinSystemParams p;
    auto eff = esr_frequencies(p, {}).as_array();
    auto full = esr_frequencies_full(p, {}).as_array();
    // Nuclear flip-flop admixture is second order in A / (electron Zeeman).
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(eff[k], full[k], 1.0);
}

TEST(spin_model, line_levels) {
    EXPECT_EQ(line_levels(1, false), (std::array<int, 2>{0, 2}));
    EXPECT_EQ(line_levels(1, true), (std::array<int, 2>{1, 3}));
    EXPECT_EQ(line_levels(2, false), (std::array<int, 2>{0, 1}));
    EXPECT_EQ(line_levels(2, true), (std::array<int, 2>{2, 3}));
}
