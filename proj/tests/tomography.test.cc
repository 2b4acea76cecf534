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

#include "donorsim/tomography.h"

#include <cmath>
#include <random>

#include "donorsim/linalg.h"
#include "gtest/gtest.h"

using namespace donorsim;

namespace {

CMatrix phi_plus() {
    CMatrix rho = CMatrix::Zero(4, 4);
    rho(0, 0) = rho(0, 3) = rho(3, 0) = rho(3, 3) = 0.5;
    return rho;
}

CMatrix werner(double p) { return p * phi_plus() + (1.0 - p) * CMatrix::Identity(4, 4) / 4.0; }

CMatrix random_unitary(int dim, std::mt19937_64 &gen) {
    std::normal_distribution<double> n;
    CMatrix z(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) z(i, j) = Complex(n(gen), n(gen));
    Eigen::HouseholderQR<CMatrix> qr(z);
    return qr.householderQ();
}

CMatrix random_state(std::mt19937_64 &gen) {
    std::normal_distribution<double> n;
    CMatrix a(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) a(i, j) = Complex(n(gen), n(gen));
    CMatrix rho = a * a.adjoint();
    return rho / rho.trace().real();
}

// Simplex projection by bisection on the water level.
std::vector<double> water_fill(const std::vector<double> &v) {
    double lo = *std::min_element(v.begin(), v.end()) - 1.0, hi = *std::max_element(v.begin(), v.end());
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi), s = 0.0;
        for (double x : v) s += std::max(0.0, x - mid);
        (s > 1.0 ? lo : hi) = mid;
    }
    std::vector<double> out;
    for (double x : v) out.push_back(std::max(0.0, x - lo));
    return out;
}

BellExperimentConfig noiseless(int shots) {
    BellExperimentConfig cfg;
    cfg.readout = ReadoutModel::perfect();
    cfg.shots = shots;
    return cfg;
}

}  // namespace

TEST(tomography, ideal_reversal_returns_to_down_down) {
    auto cfg = noiseless(1000);
    cfg.phases = {0.0};
    auto data = phase_reversal_experiment(cfg, 1);
    EXPECT_EQ(data.p_up_q1[0], 0.0);
    EXPECT_EQ(data.p_up_q2[0], 0.0);
}

TEST(tomography, ideal_corners) {
    auto cfg = noiseless(1000000);
    auto data = phase_reversal_experiment(cfg, 2);
    auto pops = measure_populations(cfg, 2);
    Corners c = extract_corners(data, pops);
    EXPECT_NEAR(c.rho11, 0.5, 0.003);
    EXPECT_NEAR(c.rho44, 0.5, 0.003);
    EXPECT_NEAR(std::abs(c.rho14), 0.5, 0.003);
    EXPECT_NEAR(std::arg(c.rho14), 0.0, 0.01);
    EXPECT_NEAR(bell_fidelity(c), 1.0, 0.005);
}

TEST(tomography, corner_phase_follows_state) {
    for (double alpha : {0.4, -1.1, 2.5}) {
        auto cfg = noiseless(200000);
        Unitary z = kron(Unitary(Eigen::Vector2cd(std::polar(1.0, -alpha / 2), std::polar(1.0, alpha / 2)).asDiagonal()),
                         identity(2));
        cfg.state_channel = [z](const DensityMatrix &rho) { return DensityMatrix(z * rho * z.adjoint()); };
        DensityMatrix truth = z * phi_plus() * z.adjoint();
        Corners c = extract_corners(phase_reversal_experiment(cfg, 3), measure_populations(cfg, 3));
        EXPECT_NEAR(std::abs(c.rho14 - truth(0, 3)), 0.0, 0.01) << alpha;
    }
}

TEST(tomography, dephased_corner_magnitude) {
    for (double p : {0.2, 0.5, 0.8}) {
        auto cfg = noiseless(100000);
        cfg.state_channel = [p](const DensityMatrix &rho) {
            CMatrix z1 = kron(pauli(3), identity(2));
            return DensityMatrix((1 - p / 2) * rho + (p / 2) * z1 * rho * z1);
        };
        Corners c = extract_corners(phase_reversal_experiment(cfg, 4), measure_populations(cfg, 4));
        EXPECT_NEAR(std::abs(c.rho14), 0.5 * (1 - p), 0.01) << p;
    }
}

TEST(tomography, mixed_state_is_flat) {
    auto cfg = noiseless(10000);
    cfg.state_channel = [](const DensityMatrix &) { return DensityMatrix(CMatrix::Identity(4, 4) / 4.0); };
    auto data = phase_reversal_experiment(cfg, 5);
    auto fit = fit_reversal_curve(data.phases, data.p_up_q1);
    EXPECT_NEAR(std::hypot(fit[1], fit[2]), 0.0, 0.01);
    Corners c = extract_corners(data, measure_populations(cfg, 5));
    EXPECT_NEAR(std::abs(c.rho14), 0.0, 0.01);
    EXPECT_NEAR(bell_fidelity(c), 0.25, 0.02);
}

TEST(tomography, flat_data_gives_zero_coherence) {
    PhaseReversalData d;
    d.phases = default_phases();
    d.p_up_q1.assign(d.phases.size(), 0.5);
    d.p_up_q2.assign(d.phases.size(), 0.5);
    Corners c = extract_corners(d, {0.25, 0.25, 0.25, 0.25});
    EXPECT_NEAR(std::abs(c.rho14), 0.0, 1e-12);
    EXPECT_FALSE(c.exceeds_bound);
}

TEST(tomography, bound_violation_is_flagged_not_clipped) {
    PhaseReversalData d;
    d.phases = default_phases();
    for (double ph : d.phases) {
        d.p_up_q1.push_back(0.5 - 0.5 * std::cos(2 * ph));
        d.p_up_q2.push_back(0.0);
    }
    Corners c = extract_corners(d, {0.4, 0.1, 0.1, 0.4});
    EXPECT_TRUE(c.exceeds_bound);
    EXPECT_NEAR(std::abs(c.rho14), 0.5, 1e-12);
}

TEST(tomography, noiseless_pipeline) {
    auto r = bell_tomography(noiseless(10000), 6);
    EXPECT_GE(r.fidelity_corrected, 0.99);
    EXPECT_GE(r.concurrence, 0.98);
}

TEST(tomography, corner_error_scales_with_shots) {
    std::vector<double> rms;
    for (int shots : {100, 1000, 10000}) {
        double ss = 0.0;
        const int reps = 24;
        for (int s = 0; s < reps; ++s) {
            auto cfg = noiseless(shots);
            Corners c = extract_corners(phase_reversal_experiment(cfg, 100 + s), measure_populations(cfg, 100 + s));
            ss += std::norm(c.rho14 - 0.5);
        }
        rms.push_back(std::sqrt(ss / reps));
    }
    for (int k = 0; k < 2; ++k) {
        double ratio = rms[k] / rms[k + 1];
        EXPECT_GT(ratio, std::sqrt(10.0) / 1.6) << k;
        EXPECT_LT(ratio, std::sqrt(10.0) * 1.6) << k;
    }
}

TEST(tomography, spam_correct_perfect_readout_is_identity) {
    auto cfg = noiseless(1000);
    auto data = phase_reversal_experiment(cfg, 7);
    auto out = spam_correct(data, ReadoutModel::perfect(), 0.0);
    EXPECT_TRUE(out.spam_corrected);
    for (size_t k = 0; k < data.phases.size(); ++k) {
        EXPECT_NEAR(out.p_up_q1[k], data.p_up_q1[k], 1e-15);
        EXPECT_NEAR(out.p_up_q2[k], data.p_up_q2[k], 1e-15);
    }
}

TEST(tomography, spam_correct_divides_amplitude_by_contrast) {
    ReadoutModel m;
    m.p_up_given_up = 0.9;
    m.p_up_given_down = 0.2;
    PhaseReversalData d;
    d.phases = default_phases();
    for (double ph : d.phases) {
        d.p_up_q1.push_back(0.5 + 0.3 * std::cos(2 * ph));
        d.p_up_q2.push_back(0.5);
    }
    auto raw = fit_reversal_curve(d.phases, d.p_up_q1);
    auto fixed = fit_reversal_curve(d.phases, spam_correct(d, m, 0.0).p_up_q1);
    EXPECT_NEAR(fixed[1], raw[1] / m.contrast(), 1e-12);
}

TEST(tomography, spam_correct_rejects_zero_contrast) {
    ReadoutModel m;
    m.p_up_given_up = m.p_up_given_down = 0.5;
    PhaseReversalData d;
    d.phases = {0.0};
    d.p_up_q1 = d.p_up_q2 = {0.5};
    EXPECT_THROW(spam_correct(d, m, 0.0), std::domain_error);
}

TEST(tomography, injected_fidelity_is_recovered) {
    BellExperimentConfig cfg;
    cfg.shots = 10000;
    cfg.prep_error = 0.03;
    cfg.state_depolarizing = 0.09333;
    auto r = repeated_bell_tomography(cfg, 5, 8);
    EXPECT_NEAR(r.fidelity_mean, 0.93, 0.02);
    EXPECT_LT(r.fidelity_raw_mean, r.fidelity_mean);
}

TEST(tomography, error_bars_shrink_with_shots) {
    auto lo = repeated_bell_tomography(noiseless(300), 10, 9);
    auto hi = repeated_bell_tomography(noiseless(30000), 10, 9);
    EXPECT_GT(lo.fidelity_two_sigma, hi.fidelity_two_sigma);
}

TEST(tomography, bell_fidelity_is_affine) {
    Corners a{0.5, 0.5, Complex(0.5, 0.0), false};
    Corners b{0.25, 0.25, Complex(0.0, 0.0), false};
    EXPECT_NEAR(bell_fidelity(a), 1.0, 1e-15);
    EXPECT_NEAR(bell_fidelity(b), 0.25, 1e-15);
    Corners mid{0.375, 0.375, Complex(0.25, 0.0), false};
    EXPECT_NEAR(bell_fidelity(mid), 0.5 * (bell_fidelity(a) + bell_fidelity(b)), 1e-15);
}

TEST(tomography, nearest_physical_leaves_physical_states) {
    std::mt19937_64 gen(10);
    for (int k = 0; k < 10; ++k) {
        CMatrix rho = random_state(gen);
        EXPECT_LT((nearest_physical(rho) - rho).norm(), 1e-12);
    }
}

TEST(tomography, nearest_physical_matches_water_filling) {
    CMatrix rho = CMatrix::Zero(4, 4);
    std::vector<double> d = {0.6, 0.5, 0.0, -0.1};
    for (int k = 0; k < 4; ++k) rho(k, k) = d[k];
    CMatrix p = nearest_physical(rho);
    auto expect = water_fill(d);
    for (int k = 0; k < 4; ++k) EXPECT_NEAR(p(k, k).real(), expect[k], 1e-12);
    EXPECT_NEAR(p(0, 0).real(), 0.55, 1e-12);
}

TEST(tomography, nearest_physical_projection_properties) {
    std::mt19937_64 gen(11);
    std::normal_distribution<double> n;
    for (int k = 0; k < 10; ++k) {
        CMatrix h(4, 4);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) h(i, j) = Complex(n(gen), n(gen));
        h = 0.5 * (h + h.adjoint().eval());
        h += (1.0 - h.trace().real()) / 4.0 * CMatrix::Identity(4, 4);
        CMatrix p = nearest_physical(h);
        EXPECT_GE(min_eigenvalue(p), -1e-12);
        EXPECT_NEAR(p.trace().real(), 1.0, 1e-12);
        EXPECT_LT((nearest_physical(p) - p).norm(), 1e-12);
        for (int t = 0; t < 5; ++t) {
            CMatrix s = random_state(gen);
            EXPECT_LE((p - s).norm(), (h - s).norm() + 1e-12);
        }
    }
}

TEST(tomography, nearest_physical_pure_state_perturbation) {
    const double eps = 1e-3;
    CMatrix rho = phi_plus();
    rho(1, 1) -= eps;
    rho(2, 2) += eps;
    CMatrix p = nearest_physical(rho);
    double f = (phi_plus() * p).trace().real();
    EXPECT_GE(f, 1.0 - eps);
}

TEST(tomography, concurrence_examples) {
    EXPECT_NEAR(concurrence(phi_plus()), 1.0, 1e-9);
    EXPECT_NEAR(concurrence(CMatrix::Identity(4, 4) / 4.0), 0.0, 1e-9);
    for (double p : {0.4, 0.6, 0.9}) {
        EXPECT_NEAR(concurrence(werner(p)), std::max(0.0, (3 * p - 1) / 2), 1e-9) << p;
    }
}

TEST(tomography, concurrence_local_unitary_invariance) {
    std::mt19937_64 gen(12);
    for (int k = 0; k < 20; ++k) {
        CMatrix rho = random_state(gen);
        CMatrix u = kron(random_unitary(2, gen), random_unitary(2, gen));
        EXPECT_NEAR(concurrence(rho), concurrence(u * rho * u.adjoint()), 1e-9);
    }
}

TEST(tomography, concurrence_rejects_unphysical) {
    CMatrix rho = CMatrix::Zero(4, 4);
    rho(0, 0) = 1.1;
    rho(1, 1) = -0.1;
    EXPECT_THROW(concurrence(rho), std::invalid_argument);
}

TEST(tomography, config_validation) {
    auto cfg = noiseless(0);
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg.shots = 10;
    cfg.prep_error = 0.7;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
}
