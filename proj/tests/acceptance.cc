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


// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "donorsim/channels.h"
#include "donorsim/coherence.h"
#include "donorsim/gst/budget.h"
#include "donorsim/gst/dataset.h"
#include "donorsim/gst/design.h"
#include "donorsim/gst/estimate.h"
#include "donorsim/gst/gauge.h"
#include "donorsim/gst/suite.h"
#include "donorsim/linalg.h"
#include "donorsim/noise_models.h"
#include "donorsim/pulse_engine.h"
#include "donorsim/readout.h"
#include "donorsim/spin_model.h"
#include "donorsim/tomography.h"

using namespace donorsim;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string &what) {
        if (!ok) pass = false;
        if (!detail.empty()) detail += "; ";
        detail += what + (ok ? "" : " [miss]");
    }
};

std::string f(const char *fmt, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, fmt, a, b, c);
    return buf;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = a + (b - a) * i / (n - 1);
    return out;
}

// ---------------------------------------------------------------- criterion 1
Outcome mixing_angle_value() {
    Outcome o;
    const double c = std::cos(mixing_angle(12.0, 112.0));
    o.require(std::abs(c - 0.9986) <= 1e-4, f("cos(theta) = %.6f, want 0.9986 +- 0.0001", c));
    return o;
}

// ---------------------------------------------------------------- criterion 2
Eigen::Matrix2cd s_op(int k) {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    if (k == 0) m << 0, 0.5, 0.5, 0;
    if (k == 1) m << 0, Complex(0, -0.5), Complex(0, 0.5), 0;
    if (k == 2) m << -0.5, 0, 0, 0.5;
    return m;
}

// Spin k of n (basis order down, up per spin; first spin most significant).
CMatrix on_site(const Eigen::Matrix2cd &op, int k, int n) {
    CMatrix out = CMatrix::Identity(1, 1);
    for (int i = 0; i < n; ++i) {
        const CMatrix fac = i == k ? CMatrix(op) : CMatrix::Identity(2, 2);
        CMatrix next(out.rows() * 2, out.cols() * 2);
        for (int a = 0; a < out.rows(); ++a)
            for (int b = 0; b < out.cols(); ++b) next.block(2 * a, 2 * b, 2, 2) = out(a, b) * fac;
        out = next;
    }
    return out;
}

// Lines from a dense diagonalization of electrons + nuclei, each level labelled by
// its largest product-state component.
std::array<double, 4> full_oracle_lines(const SpinSystemParams &p, int n1_up, int n2_up) {
    const double mu = 13996.24493;
    auto dot = [&](int a, int b) {
        CMatrix d = CMatrix::Zero(16, 16);
        for (int k = 0; k < 3; ++k) d += on_site(s_op(k), a, 4) * on_site(s_op(k), b, 4);
        return d;
    };
    CMatrix h = mu * p.b0_tesla * (p.g1 * on_site(s_op(2), 0, 4) + p.g2 * on_site(s_op(2), 1, 4));
    h += p.gamma_n_mhz_per_t * p.b0_tesla * (on_site(s_op(2), 2, 4) + on_site(s_op(2), 3, 4));
    h += p.a1_mhz * dot(0, 2) + p.a2_mhz * dot(1, 3) + p.j_mhz * dot(0, 1);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    auto energy = [&](int e1, int e2) {
        const int idx = 8 * e1 + 4 * e2 + 2 * n1_up + n2_up;
        Eigen::Index best = 0;
        es.eigenvectors().row(idx).cwiseAbs().maxCoeff(&best);
        return es.eigenvalues()(best);
    };
    return {energy(1, 0) - energy(0, 0), energy(1, 1) - energy(0, 1), energy(0, 1) - energy(0, 0),
            energy(1, 1) - energy(1, 0)};
}

Outcome spectrum_lines() {
    Outcome o;
    const SpinSystemParams p;
    const NuclearConfig nucs = NuclearConfig::parse("ud");
    const EsrLines l = esr_frequencies(p, nucs);
    o.require(std::abs(l.q1_c_up - l.q1_c_down - 12.0) <= 0.5 && std::abs(l.q2_c_up - l.q2_c_down - 12.0) <= 0.5,
              f("splits %.4f, %.4f MHz, want 12 +- 0.5", l.q1_c_up - l.q1_c_down, l.q2_c_up - l.q2_c_down));
    const auto full = esr_frequencies_full(p, nucs).as_array();
    const auto oracle = full_oracle_lines(p, 1, 0);
    double worst = 0.0;
    for (int k = 0; k < 4; ++k) worst = std::max(worst, std::abs(full[k] - oracle[k]));
    o.require(worst <= 1e-9, f("full-Hamiltonian lines vs dense oracle %.2e MHz, want <= 1e-9", worst));
    // Closed-form levels of the two-electron exchange Hamiltonian.
    const double nu1 = electron_frequency(p, 1, nucs), nu2 = electron_frequency(p, 2, nucs), j = p.j_mhz;
    const double root = 0.5 * std::hypot(nu1 - nu2, j);
    const double e_dd = -0.5 * (nu1 + nu2) + j / 4, e_uu = 0.5 * (nu1 + nu2) + j / 4;
    const double e_hi = -j / 4 + root, e_lo = -j / 4 - root;
    const double e_ud = nu1 > nu2 ? e_hi : e_lo, e_du = nu1 > nu2 ? e_lo : e_hi;
    const std::array<double, 4> closed = {e_ud - e_dd, e_uu - e_du, e_du - e_dd, e_uu - e_ud};
    const auto eff = l.as_array();
    double worst_eff = 0.0;
    for (int k = 0; k < 4; ++k) worst_eff = std::max(worst_eff, std::abs(eff[k] - closed[k]));
    o.require(worst_eff <= 1e-9, f("effective lines vs closed form %.2e MHz", worst_eff));
    const double sep = std::abs(0.5 * (l.q1_c_down + l.q1_c_up) - 0.5 * (l.q2_c_down + l.q2_c_up));
    o.require(std::abs(sep - p.abar_mhz()) <= 0.01 * p.abar_mhz(),
              f("across-target separation %.3f MHz vs Abar %.1f (1%%)", sep, p.abar_mhz()));
    return o;
}

// ---------------------------------------------------------------- criterion 3
Outcome coherence_null() {
    Outcome o;
    NoiseParams n;
    n.sigma_detuning_q1_mhz = 0.1;
    n.sigma_detuning_q2_mhz = 0.1;
    n.t2_hahn_us = 800.0;
    n.sigma_j_mhz = 0.0;
    CoherenceOptions opt;
    opt.target = Qubit::Q2;
    opt.shots = 10000;
    SpinSystemParams on, off;
    off.j_mhz = 0.0;
    opt.detuning_mhz = 0.5;
    const auto taus_r = linspace(0.0, 6.0, 41);
    const CoherenceCurve r_on = ramsey_experiment(taus_r, on, {}, n, opt, 31);
    const CoherenceCurve r_off = ramsey_experiment(taus_r, off, {}, n, opt, 32);
    const double err_r = std::hypot(r_on.fit.decay_time_stderr, r_off.fit.decay_time_stderr);
    o.require(std::abs(r_on.t2_us - r_off.t2_us) <= 3.0 * err_r,
              f("T2* on/off %.4f / %.4f us, combined 3-sigma %.4f", r_on.t2_us, r_off.t2_us, 3.0 * err_r));
    opt.detuning_mhz = 0.005;
    const auto taus_h = linspace(0.0, 2000.0, 31);
    const CoherenceCurve h_on = hahn_experiment(taus_h, on, {}, n, opt, 33);
    const CoherenceCurve h_off = hahn_experiment(taus_h, off, {}, n, opt, 34);
    const double err_h = std::hypot(h_on.fit.decay_time_stderr, h_off.fit.decay_time_stderr);
    o.require(std::abs(h_on.t2_us - h_off.t2_us) <= 3.0 * err_h,
              f("T2 on/off %.1f / %.1f us, combined 3-sigma %.1f", h_on.t2_us, h_off.t2_us, 3.0 * err_h));
    NoiseParams qs;
    qs.sigma_detuning_q1_mhz = 0.1;
    qs.sigma_detuning_q2_mhz = 0.1;
    opt.detuning_mhz = 0.0;
    double worst = 0.0;
    for (const SpinSystemParams &sp : {on, off}) {
        const CoherenceCurve h = hahn_experiment(linspace(0.0, 50.0, 21), sp, {}, qs, opt, 35);
        for (double v : h.p_up) worst = std::max(worst, std::abs(v - h.p_up.front()));
    }
    o.require(worst <= 1e-9, f("quasi-static Hahn deviation from flat %.1e", worst));
    return o;
}

// ---------------------------------------------------------------- criterion 4
Outcome ramsey_oracle() {
    Outcome o;
    NoiseParams n;
    n.sigma_detuning_q1_mhz = 0.1;
    CoherenceOptions opt;
    opt.target = Qubit::Q1;
    opt.shots = 10000;
    opt.detuning_mhz = 0.5;
    const CoherenceCurve c = ramsey_experiment(linspace(0.0, 6.0, 41), SpinSystemParams{}, {}, n, opt, 41);
    const double oracle = std::sqrt(2.0) / (kTwoPi * 0.1);
    o.require(c.fit.converged, "fit converged");
    o.require(std::abs(c.t2_us / oracle - 1.0) <= 0.05, f("T2* %.4f us vs sqrt(2)/(2 pi sigma) = %.4f (5%%)", c.t2_us, oracle));
    return o;
}

// ---------------------------------------------------------------- criterion 5
Outcome bell_pipeline() {
    Outcome o;
    BellExperimentConfig ideal;
    ideal.shots = 10000;
    const BellTomographyResult r = bell_tomography(ideal, 51);
    o.require(r.fidelity_corrected >= 0.99, f("noiseless F = %.4f (>= 0.99)", r.fidelity_corrected));
    o.require(r.concurrence >= 0.98, f("noiseless C = %.4f (>= 0.98)", r.concurrence));
    BellExperimentConfig noisy;
    noisy.shots = 10000;
    noisy.readout = ReadoutModel{};
    noisy.prep_error = 0.03;
    noisy.state_depolarizing = 0.09333;
    const RepeatedBellResult rep = repeated_bell_tomography(noisy, 5, 52);
    o.require(std::abs(rep.fidelity_mean - 0.93) <= 0.02, f("calibrated F = %.4f (0.93 +- 0.02)", rep.fidelity_mean));
    o.require(rep.fidelity_raw_mean < rep.fidelity_mean, f("uncorrected F = %.4f is lower", rep.fidelity_raw_mean));
    return o;
}

// ---------------------------------------------------------------- criterion 6
Outcome werner_concurrence() {
    Outcome o;
    CMatrix phi = CMatrix::Zero(4, 4);
    phi(0, 0) = phi(0, 3) = phi(3, 0) = phi(3, 3) = 0.5;
    double worst = 0.0;
    for (double p : {0.4, 0.6, 0.9}) {
        const CMatrix w = p * phi + (1.0 - p) * CMatrix::Identity(4, 4) / 4.0;
        worst = std::max(worst, std::abs(concurrence(w) - std::max(0.0, (3.0 * p - 1.0) / 2.0)));
    }
    o.require(worst <= 1e-10, f("max |C - max(0, (3p-1)/2)| = %.1e (<= 1e-10)", worst));
    return o;
}

// ---------------------------------------------------------------- criterion 7
CMatrix rotation_with_angle(const CMatrix &u, double angle) {
    // u = cos(t/2) I - i sin(t/2) n.sigma; keep n, replace t.
    const double c = u.trace().real() / 2.0;
    const double t = 2.0 * std::acos(std::clamp(c, -1.0, 1.0));
    CMatrix out = std::cos(angle / 2.0) * CMatrix::Identity(2, 2);
    for (int k = 1; k <= 3; ++k) {
        const double nk = (Complex(0, 1) * (pauli(k) * u).trace()).real() / (2.0 * std::sin(t / 2.0));
        out += Complex(0, -std::sin(angle / 2.0) * nk) * pauli(k);
    }
    return out;
}

gst::ErrorBudget fit_budget(const gst::GateSet &truth, uint64_t seed, bool &converged) {
    const gst::GateSet target = gst::target_1q();
    const gst::GSTDesign design = gst::default_design_1q();
    const auto est = gst::estimate(gst::simulate_counts(truth, design, 10000, seed), design, target);
    converged = converged && est.converged;
    gst::GaugeOptions go;
    go.group = gst::GaugeGroup::Unitary;
    return gst::error_budget(gst::gauge_optimize(est.gateset, target, go).gateset, target);
}

Outcome gst_recovery() {
    Outcome o;
    bool converged = true;
    const gst::GateSet target = gst::target_1q();

    const gst::ErrorBudget ideal = fit_budget(target, 71, converged);
    double worst = 1.0;
    for (const auto &g : ideal.gates) worst = std::min(worst, g.fidelity);
    o.require(worst >= 0.999, f("noiseless min F = %.5f (>= 0.999)", worst));

    const double eps = 2.0 * kPi / 180.0;
    gst::GateSet over = target;
    over.gates["Gx"] = ptm_from_unitary(rotation_with_angle(target.unitaries.at("Gx"), kPi / 2 + eps));
    const double rec = fit_budget(over, 72, converged).at("Gx").over_rotation_rad;
    o.require(std::abs(rec - eps) <= 0.1 * eps, f("2 deg over-rotation recovered as %.4f deg (10%%)", rec * 180.0 / kPi));

    const double p = 0.01;
    gst::GateSet dep = target;
    for (auto &[l, g] : dep.gates) g = depolarizing_channel(p, 2).ptm() * g;
    const gst::ErrorBudget bd = fit_budget(dep, 73, converged);
    double worst_rel = 0.0;
    for (const auto &g : bd.gates) worst_rel = std::max(worst_rel, std::abs(g.depolarizing_p / p - 1.0));
    o.require(worst_rel <= 0.1, f("1%% depolarization recovered, worst relative error %.3f (<= 0.1)", worst_rel));
    o.require(converged, "all estimates converged");
    return o;
}

// ---------------------------------------------------------------- criterion 8
Outcome device_envelope() {
    Outcome o;
    const gst::DeviceModel device = gst::DeviceModel::calibrated();
    const auto cond = gst::run_device_suite(gst::SuiteMode::Cond1q, device, {}, 81);
    const auto two = gst::run_device_suite(gst::SuiteMode::TwoQubit, device, {}, 82);
    const std::vector<std::string> l1 = {"Gi", "Gx", "Gy"};
    const double lo = cond.min_fidelity(l1), hi = cond.max_fidelity(l1);
    o.require(lo >= 0.995 && hi <= 0.999, f("cond-1q fidelities in [%.5f, %.5f], want within [0.995, 0.999]", lo, hi));
    const std::vector<std::string> crots = {"Gx1d", "Gx1u", "Gy1d", "Gy1u", "Gx2d", "Gx2u", "Gy2d", "Gy2u"};
    const double two_hi = two.max_fidelity(crots), one_lo = cond.min_fidelity({"Gx", "Gy"});
    o.require(two_hi < one_lo, f("2q CROT max F %.5f < 1q rotation min F %.5f", two_hi, one_lo));
    o.require(cond.converged() && two.converged(), "all estimates converged");
    return o;
}

// ---------------------------------------------------------------- criterion 9
Outcome geometric_phase() {
    Outcome o;
    const double rabi = 0.2;
    double worst = 0.0;
    for (double r : linspace(0.0, 0.3, 13)) {
        const auto g = geometric_phase_analysis(r * rabi, rabi, 2.0 * kPi);
        worst = std::max(worst, std::abs(wrap_angle(g.control_phase_geometric - g.half_solid_angle)));
    }
    o.require(worst <= 1e-3, f("max |phase - half solid angle| = %.2e rad (<= 1e-3)", worst));
    return o;
}

// --------------------------------------------------------------- criterion 10
double binomial_tail(int n, int k_min, double q) {
    double s = 0.0;
    for (int k = k_min; k <= n; ++k) {
        s += std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)) * std::pow(q, k) *
             std::pow(1.0 - q, n - k);
    }
    return s;
}

Outcome qnd_readout_gain() {
    Outcome o;
    ReadoutModel m;
    o.require(std::abs(m.contrast() - 0.48) < 1e-12, f("per-cycle contrast %.2f", m.contrast()));
    m.t1_s = std::numeric_limits<double>::infinity();
    m.n_qnd = 11;
    const Confusion c11 = qnd_confusion(m);
    o.require(c11.contrast() > 0.48, f("combined contrast at n = 11: %.4f (> 0.48)", c11.contrast()));
    bool monotone = true;
    double prev = 0.0;
    for (int n = 1; n <= 11; ++n) {
        m.n_qnd = n;
        const double c = qnd_confusion(m).contrast();
        if (c < prev - 1e-15) monotone = false;
        prev = c;
    }
    o.require(monotone, "contrast non-decreasing in n = 1..11");
    const double tail = binomial_tail(11, 6, 0.26);
    const double dev = std::max(std::abs(c11.p_up_given_down - tail), std::abs(1.0 - c11.p_up_given_up - tail));
    o.require(dev <= 1e-14, f("symmetric error vs binomial tail %.1e", dev));
    return o;
}

// --------------------------------------------------------------- criterion 11
CMatrix random_complex(int d, std::mt19937_64 &gen) {
    std::normal_distribution<double> n;
    CMatrix z(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) z(i, j) = Complex(n(gen), n(gen));
    return z;
}

// Choi matrix from the action of the PTM on matrix units.
CMatrix choi_of(const RMatrix &ptm, int d) {
    CMatrix j = CMatrix::Zero(d * d, d * d);
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            CMatrix e = CMatrix::Zero(d, d);
            e(a, b) = 1.0;
            const CMatrix out = ptm_to_operator(ptm.cast<Complex>() * operator_to_ptm(e));
            j.block(a * d, b * d, d, d) = out;
        }
    }
    return j;
}

Outcome structural_invariants() {
    Outcome o;
    std::mt19937_64 gen(1101);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const int cases = 100;

    // Unitarity of pulse-level gates under random noise offsets.
    ProcessorConfig pc;
    pc.backend = GateBackend::Pulse;
    const Processor proc(pc);
    double worst_u = 0.0;
    for (int k = 0; k < cases; ++k) {
        const Qubit t = u01(gen) < 0.5 ? Qubit::Q1 : Qubit::Q2;
        const ControlCondition c = u01(gen) < 0.5 ? ControlCondition::Down : ControlCondition::Up;
        NoiseRealization nr;
        nr.offset_q1_mhz = 0.2 * (u01(gen) - 0.5);
        nr.offset_q2_mhz = 0.2 * (u01(gen) - 0.5);
        const GateLabel g = GateLabel::crot(t, c, kPi * u01(gen), kTwoPi * u01(gen));
        worst_u = std::max(worst_u, unitarity_error(proc.gate(g, &nr)));
    }
    o.require(worst_u <= 1e-10, f("unitarity error %.1e (<= 1e-10)", worst_u));

    // CPTP and trace preservation of channels and model gates.
    double worst_choi = 0.0, worst_tp = 0.0;
    const gst::LindbladModel model(gst::target_1q());
    for (int k = 0; k < cases; ++k) {
        const double t = 10.0 * u01(gen);
        Channel ch = channel(static_cast<ChannelKind>(k % 3), u01(gen), t);
        RMatrix ptm1 = ch.ptm() * dephasing_generator_channel(0.1 * u01(gen)).ptm();
        RMatrix ptm2 = depolarizing_channel(u01(gen), 4).ptm() * ch.on_qubit(1 + k % 2).ptm();
        ChannelRates rates;
        rates.t1_s = 1e-3 * (1.0 + u01(gen));
        rates.t2_us = 1.0 + 100.0 * u01(gen);
        const double dur = 10.0 * u01(gen), pd = 0.1 * u01(gen);
        RMatrix ptm3 = ptm_from_map([&](const CMatrix &r) { return apply_decoherence(r, rates, dur, pd); }, 4);
        RVector x = RVector::Zero(model.num_params());
        for (int i = 0; i < model.num_params(); ++i) x(i) = 0.05 * (u01(gen) - 0.5);
        const auto bounded = model.nonnegative();
        for (int i = 0; i < model.num_params(); ++i) {
            if (bounded[i]) x(i) = std::abs(x(i));
        }
        const gst::GateSet built = model.build(x);
        std::vector<RMatrix> maps = {ptm1, ptm2, ptm3};
        for (const auto &[l, g] : built.gates) maps.push_back(g);
        for (const RMatrix &m : maps) {
            const int d = m.rows() == 4 ? 2 : 4;
            Eigen::SelfAdjointEigenSolver<CMatrix> es(choi_of(m, d));
            worst_choi = std::max(worst_choi, -es.eigenvalues().minCoeff());
            RVector row = m.row(0).transpose();
            row(0) -= 1.0;
            worst_tp = std::max(worst_tp, row.cwiseAbs().maxCoeff());
        }
    }
    o.require(worst_choi <= 1e-8, f("most negative Choi eigenvalue %.1e (>= -1e-8)", -worst_choi));
    o.require(worst_tp <= 1e-10, f("trace-preservation row error %.1e (<= 1e-10)", worst_tp));

    // Projection of random Hermitian matrices onto density matrices.
    double worst_phys = 0.0, worst_idem = 0.0;
    for (int k = 0; k < cases; ++k) {
        const int d = k % 2 ? 4 : 2;
        const CMatrix z = random_complex(d, gen);
        const CMatrix h = 0.5 * (z + z.adjoint());
        const CMatrix p = nearest_physical(h);
        Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (p + p.adjoint()));
        worst_phys = std::max({worst_phys, -es.eigenvalues().minCoeff(), std::abs(p.trace() - 1.0),
                               (p - p.adjoint()).norm()});
        worst_idem = std::max(worst_idem, (nearest_physical(p) - p).norm());
    }
    o.require(worst_phys <= 1e-10, f("projected states: worst PSD / trace / Hermiticity defect %.1e", worst_phys));
    o.require(worst_idem <= 1e-10, f("projection idempotence defect %.1e", worst_idem));
    return o;
}

struct Criterion {
    int number;
    const char *name;
    double budget_s;
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "mixing angle", 1.0, mixing_angle_value},
        {2, "ESR spectrum", 1.0, spectrum_lines},
        {3, "coherence null result", 60.0, coherence_null},
        {4, "Ramsey Gaussian oracle", 60.0, ramsey_oracle},
        {5, "Bell pipeline", 300.0, bell_pipeline},
        {6, "Werner concurrence", 1.0, werner_concurrence},
        {7, "GST injection and recovery", 600.0, gst_recovery},
        {8, "GST device envelope and ordering", 600.0, device_envelope},
        {9, "geometric phase", 60.0, geometric_phase},
        {10, "QND readout gain", 60.0, qnd_readout_gain},
        {11, "structural invariants", 120.0, structural_invariants},
    };
    int failed = 0;
    for (const auto &c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception &e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        o.require(dt <= c.budget_s, f("%.2f s (budget %.0f s)", dt, c.budget_s));
        if (!o.pass) ++failed;
        std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", c.number, c.name, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
