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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "donorsim/channels.h"

namespace donorsim {

Circuit bell_prep_circuit() {
    return {GateLabel::x90(Qubit::Q1), GateLabel::crot(Qubit::Q2, ControlCondition::Up, kPi, kPi)};
}

Circuit reversal_circuit(const Circuit &prep, double phase) {
    Circuit lowered = lower_circuit(prep);
    Circuit out;
    for (auto it = lowered.rbegin(); it != lowered.rend(); ++it) {
        GateLabel g = *it;
        if (g.kind != GateKind::Idle) {
            g.phase = g.phase + kPi + phase;
        }
        out.push_back(g);
    }
    return out;
}

std::vector<double> default_phases(int n) {
    std::vector<double> v(n);
    for (int k = 0; k < n; ++k) {
        v[k] = kTwoPi * k / n;
    }
    return v;
}

void BellExperimentConfig::validate() const {
    noise.validate();
    readout.validate();
    if (shots < 1) {
        throw std::invalid_argument("bell tomography needs shots >= 1");
    }
    if (noise_samples < 1) {
        throw std::invalid_argument("bell tomography needs noise_samples >= 1");
    }
    if (!(prep_error >= 0.0 && prep_error < 0.5)) {
        throw std::invalid_argument("prep_error must be in [0, 0.5)");
    }
    if (!(state_depolarizing >= 0.0 && state_depolarizing <= 1.0)) {
        throw std::invalid_argument("state_depolarizing must be in [0, 1]");
    }
}

namespace {

bool has_quasi_static(const NoiseParams &n) {
    return n.sigma_detuning_q1_mhz > 0.0 || n.sigma_detuning_q2_mhz > 0.0 || n.sigma_j_mhz > 0.0 || !n.jumps.empty();
}

/// Prepared state for one noise realization.
DensityMatrix prepared_state(const BellExperimentConfig &cfg, const Processor &proc, const NoiseRealization *noise) {
    DensityMatrix rho = initialize(std::string("dd"), cfg.prep_error);
    rho = apply_circuit(proc, bell_prep_circuit(), rho, noise);
    if (cfg.state_depolarizing > 0.0) {
        rho = depolarizing_channel(cfg.state_depolarizing, 4).apply(rho);
    }
    if (cfg.state_channel) {
        rho = cfg.state_channel(rho);
    }
    return rho;
}

/// Reported joint outcome distribution (r1, r2) with index 2 r1 + r2.
std::array<double, 4> reported(const std::array<double, 4> &truth, const Confusion &c1, const Confusion &c2) {
    std::array<double, 4> out{};
    for (int s = 0; s < 4; ++s) {
        const int s1 = s / 2, s2 = s % 2;
        double u1 = s1 ? c1.p_up_given_up : c1.p_up_given_down;
        double u2 = s2 ? c2.p_up_given_up : c2.p_up_given_down;
        for (int r = 0; r < 4; ++r) {
            double p1 = r / 2 ? u1 : 1.0 - u1;
            double p2 = r % 2 ? u2 : 1.0 - u2;
            out[r] += truth[s] * p1 * p2;
        }
    }
    return out;
}

std::array<double, 4> sample_fractions(const std::array<double, 4> &probs, int shots, Rng &rng) {
    std::vector<double> p(probs.begin(), probs.end());
    double total = std::accumulate(p.begin(), p.end(), 0.0);
    for (auto &x : p) x = std::max(0.0, x / total);
    auto counts = sample_multinomial(rng, shots, p);
    std::array<double, 4> out{};
    for (int k = 0; k < 4; ++k) {
        out[k] = static_cast<double>(counts[k]) / shots;
    }
    return out;
}

/// Averages the diagonal of f(realization) over the configured noise realizations.
template <typename F>
std::array<double, 4> averaged_populations(const BellExperimentConfig &cfg, uint64_t seed, F &&f) {
    std::array<double, 4> acc{};
    const bool sample = has_quasi_static(cfg.noise);
    const int n = sample ? cfg.noise_samples : 1;
    NoiseProcess process(cfg.noise, seed, 11);
    for (int k = 0; k < n; ++k) {
        NoiseRealization r = process.next();
        DensityMatrix rho = f(&r);
        for (int s = 0; s < 4; ++s) {
            acc[s] += std::max(0.0, rho(s, s).real()) / n;
        }
    }
    return acc;
}

}  // namespace

PhaseReversalData phase_reversal_experiment(const BellExperimentConfig &config, uint64_t seed) {
    config.validate();
    const std::vector<double> phases = config.phases.empty() ? default_phases() : config.phases;
    Processor proc(config.processor);
    const Confusion c1 = direct_confusion(config.readout);
    const Confusion c2 = qnd_confusion(config.readout);
    const Circuit prep = bell_prep_circuit();

    PhaseReversalData data;
    data.phases = phases;
    data.shots = config.shots;
    for (size_t k = 0; k < phases.size(); ++k) {
        const Circuit rev = reversal_circuit(prep, phases[k]);
        auto truth = averaged_populations(config, seed, [&](const NoiseRealization *r) {
            return apply_circuit(proc, rev, prepared_state(config, proc, r), r);
        });
        Rng rng = make_stream(seed, 10, k);
        auto frac = sample_fractions(reported(truth, c1, c2), config.shots, rng);
        data.p_up_q1.push_back(frac[2] + frac[3]);
        data.p_up_q2.push_back(frac[1] + frac[3]);
    }
    return data;
}

std::array<double, 4> measure_populations(const BellExperimentConfig &config, uint64_t seed) {
    config.validate();
    Processor proc(config.processor);
    auto truth = averaged_populations(config, seed,
                                      [&](const NoiseRealization *r) { return prepared_state(config, proc, r); });
    Rng rng = make_stream(seed, 12, 0);
    return sample_fractions(reported(truth, direct_confusion(config.readout), qnd_confusion(config.readout)),
                            config.shots, rng);
}

std::array<double, 3> fit_reversal_curve(const std::vector<double> &phases, const std::vector<double> &values) {
    if (phases.size() != values.size() || phases.size() < 3) {
        throw std::invalid_argument("reversal fit needs at least 3 matching points");
    }
    Eigen::MatrixXd a(phases.size(), 3);
    Eigen::VectorXd b(phases.size());
    for (size_t k = 0; k < phases.size(); ++k) {
        a(k, 0) = 1.0;
        a(k, 1) = std::cos(2.0 * phases[k]);
        a(k, 2) = std::sin(2.0 * phases[k]);
        b(k) = values[k];
    }
    Eigen::Vector3d x = a.colPivHouseholderQr().solve(b);
    return {x(0), x(1), x(2)};
}

Corners extract_corners(const PhaseReversalData &data, const std::array<double, 4> &populations) {
    double total = 0.0;
    for (double p : populations) {
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-6) {
        throw std::invalid_argument("populations must sum to 1");
    }
    auto fit = fit_reversal_curve(data.phases, data.p_up_q1);
    Corners c;
    c.rho11 = populations[0];
    c.rho44 = populations[3];
    // The Q1 curve is const - |rho14| cos(2 phi - arg rho14).
    c.rho14 = -Complex(fit[1], fit[2]);
    c.exceeds_bound = std::abs(c.rho14) > std::sqrt(std::max(0.0, c.rho11 * c.rho44)) + 1e-12;
    return c;
}

double bell_fidelity(const Corners &c) { return 0.5 * (c.rho11 + c.rho44) + c.rho14.real(); }

namespace {

double invert_confusion(double obs, const Confusion &c) {
    const double contrast = c.contrast();
    if (std::abs(contrast) < 1e-12) {
        throw std::domain_error("readout contrast is zero; confusion cannot be inverted");
    }
    return (obs - c.p_up_given_down) / contrast;
}

struct PrepWeights {
    double dd, du, ud, uu;
};

PrepWeights prep_weights(double p) { return {(1 - p) * (1 - p), p * (1 - p), p * (1 - p), p * p}; }

}  // namespace

PhaseReversalData spam_correct(const PhaseReversalData &data, const ReadoutModel &readout, double prep_error) {
    const Confusion c1 = direct_confusion(readout);
    const Confusion c2 = qnd_confusion(readout);
    const PrepWeights w = prep_weights(prep_error);
    // With ideal gates a flipped start |ud> returns a mirrored Q1 curve, |du> and |uu>
    // return flat Q1 curves at 0 and 1; Q2 returns 0 for |dd>, |ud> and 1 otherwise.
    if (std::abs(w.dd - w.ud) < 1e-12) {
        throw std::domain_error("preparation error of 1/2 cannot be inverted");
    }
    PhaseReversalData out = data;
    for (size_t k = 0; k < data.phases.size(); ++k) {
        double q1 = invert_confusion(data.p_up_q1[k], c1);
        double q2 = invert_confusion(data.p_up_q2[k], c2);
        out.p_up_q1[k] = (q1 - w.ud - w.uu) / (w.dd - w.ud);
        out.p_up_q2[k] = (q2 - w.du - w.uu) / (w.dd + w.ud);
    }
    out.spam_corrected = true;
    return out;
}

std::array<double, 4> spam_correct_populations(const std::array<double, 4> &populations, const ReadoutModel &readout,
                                               double prep_error) {
    const Confusion c1 = direct_confusion(readout);
    const Confusion c2 = qnd_confusion(readout);
    if (std::abs(c1.contrast()) < 1e-12 || std::abs(c2.contrast()) < 1e-12) {
        throw std::domain_error("readout contrast is zero; confusion cannot be inverted");
    }
    auto m1 = [&](const Confusion &c) {
        Eigen::Matrix2d m;
        m << 1.0 - c.p_up_given_down, 1.0 - c.p_up_given_up, c.p_up_given_down, c.p_up_given_up;
        return m;
    };
    Eigen::Matrix2d a = m1(c1), b = m1(c2);
    Eigen::Matrix4d m;
    for (int r = 0; r < 4; ++r)
        for (int s = 0; s < 4; ++s) m(r, s) = a(r / 2, s / 2) * b(r % 2, s % 2);
    Eigen::Vector4d obs(populations[0], populations[1], populations[2], populations[3]);
    Eigen::Vector4d truth = m.inverse() * obs;
    // Flipped starts |du>, |uu> populate the middle states equally under the ideal
    // prep circuit; |dd> and |ud> populate the corners.
    const PrepWeights w = prep_weights(prep_error);
    const double wc = w.dd + w.ud, wm = w.du + w.uu;
    Eigen::Vector4d mid(0.0, 0.5, 0.5, 0.0);
    Eigen::Vector4d bell = (truth - wm * mid) / wc;
    return {bell(0), bell(1), bell(2), bell(3)};
}

DensityMatrix corner_density_matrix(const Corners &c, const std::array<double, 4> &populations) {
    DensityMatrix rho = DensityMatrix::Zero(4, 4);
    for (int k = 0; k < 4; ++k) {
        rho(k, k) = populations[k];
    }
    rho(0, 0) = c.rho11;
    rho(3, 3) = c.rho44;
    rho(0, 3) = c.rho14;
    rho(3, 0) = c.rho41();
    return rho;
}

double concurrence(const DensityMatrix &rho) {
    if (rho.rows() != 4 || rho.cols() != 4) {
        throw std::invalid_argument("concurrence expects a 4x4 density matrix");
    }
    if (!is_hermitian(rho, 1e-9) || min_eigenvalue(rho) < -1e-9 || std::abs(rho.trace().real() - 1.0) > 1e-9) {
        throw std::invalid_argument("concurrence requires a physical density matrix");
    }
    const CMatrix yy = kron(pauli(2), pauli(2));
    const CMatrix r = rho * yy * rho.conjugate() * yy;
    Eigen::ComplexEigenSolver<CMatrix> es(r);
    std::array<double, 4> l{};
    for (int k = 0; k < 4; ++k) {
        l[k] = std::sqrt(std::max(0.0, es.eigenvalues()(k).real()));
    }
    std::sort(l.begin(), l.end(), std::greater<>());
    return std::max(0.0, l[0] - l[1] - l[2] - l[3]);
}

BellTomographyResult bell_tomography(const BellExperimentConfig &config, uint64_t seed) {
    BellTomographyResult out;
    out.raw = phase_reversal_experiment(config, seed);
    out.populations_raw = measure_populations(config, seed);
    out.corrected = spam_correct(out.raw, config.readout, config.prep_error);
    out.populations_corrected = spam_correct_populations(out.populations_raw, config.readout, config.prep_error);
    out.corners_raw = extract_corners(out.raw, out.populations_raw);
    out.corners_corrected = extract_corners(out.corrected, out.populations_corrected);
    out.fidelity_raw = bell_fidelity(out.corners_raw);
    out.fidelity_corrected = bell_fidelity(out.corners_corrected);
    out.rho_physical = nearest_physical(corner_density_matrix(out.corners_corrected, out.populations_corrected));
    out.concurrence = concurrence(out.rho_physical);
    return out;
}

namespace {

std::pair<double, double> mean_two_sigma(const std::vector<double> &v) {
    const double n = static_cast<double>(v.size());
    double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    double sd = v.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    return {mean, 2.0 * sd};
}

}  // namespace

RepeatedBellResult repeated_bell_tomography(const BellExperimentConfig &config, int repetitions, uint64_t seed) {
    if (repetitions < 1) {
        throw std::invalid_argument("repetitions must be >= 1");
    }
    RepeatedBellResult out;
    std::vector<double> f, fr, c;
    for (int r = 0; r < repetitions; ++r) {
        out.runs.push_back(bell_tomography(config, splitmix64(seed + 0x9e3779b97f4a7c15ULL * (r + 1))));
        f.push_back(out.runs.back().fidelity_corrected);
        fr.push_back(out.runs.back().fidelity_raw);
        c.push_back(out.runs.back().concurrence);
    }
    std::tie(out.fidelity_mean, out.fidelity_two_sigma) = mean_two_sigma(f);
    std::tie(out.fidelity_raw_mean, out.fidelity_raw_two_sigma) = mean_two_sigma(fr);
    std::tie(out.concurrence_mean, out.concurrence_two_sigma) = mean_two_sigma(c);
    return out;
}

}  // namespace donorsim
