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

#include "donorsim/coherence.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace donorsim {

void CoherenceOptions::validate() const {
    if (shots < 1) {
        throw std::invalid_argument("coherence experiment needs shots >= 1");
    }
    if (!(rabi_mhz > 0.0)) {
        throw std::invalid_argument("coherence experiment needs a positive rabi frequency");
    }
    readout.validate();
}

double analytic_t2star_us(double sigma_mhz) { return std::sqrt(2.0) / (kTwoPi * sigma_mhz); }

namespace {

enum class Sequence { Ramsey, Hahn };

/// Interaction-frame free evolution of one shot, with optional fluctuator
/// switching during the waits.
class ShotEvolution {
   public:
    ShotEvolution(const Processor &proc, const NoiseParams &params, const NoiseRealization &base,
                  const std::vector<int> &signs, Rng &rng)
        : proc_(proc), params_(params), base_(base), signs_(signs), rng_(rng) {
        for (int k = 0; k < 4; ++k) {
            e0_[k] = proc.eigen().energies[k];
        }
        set_hamiltonian(base_);
    }

    /// Advances `rho` from time t0 to t0 + dt (us).
    void wait(DensityMatrix &rho, double t0, double dt) {
        if (dt <= 0.0) {
            return;
        }
        if (params_.jump_rate_in_shot_per_us > 0.0 && !params_.jumps.empty()) {
            std::exponential_distribution<double> next_flip(params_.jump_rate_in_shot_per_us *
                                                            static_cast<double>(params_.jumps.size()));
            std::uniform_int_distribution<size_t> which(0, params_.jumps.size() - 1);
            double t = t0;
            const double end = t0 + dt;
            while (true) {
                double step = next_flip(rng_);
                if (t + step >= end) {
                    apply_piece(rho, t, end);
                    break;
                }
                apply_piece(rho, t, t + step);
                t += step;
                size_t k = which(rng_);
                current_signs_[k] = -current_signs_[k];
                NoiseRealization r = base_;
                for (size_t m = 0; m < params_.jumps.size(); ++m) {
                    double delta = 0.5 * (current_signs_[m] - signs_[m]) * params_.jumps[m].amplitude_mhz;
                    (params_.jumps[m].qubit == Qubit::Q1 ? r.offset_q1_mhz : r.offset_q2_mhz) += delta;
                }
                set_hamiltonian(r);
            }
        } else {
            apply_piece(rho, t0, t0 + dt);
        }
        rho = apply_decoherence(rho, base_.rates, dt, 0.0);
    }

   private:
    void set_hamiltonian(const NoiseRealization &r) {
        if (current_signs_.empty()) {
            current_signs_ = signs_;
        }
        const SpinSystemParams &sp = proc_.config().spin;
        const NuclearConfig &nucs = proc_.config().nucs;
        Operator h = electron_hamiltonian(electron_frequency(sp, 1, nucs) + r.offset_q1_mhz,
                                          electron_frequency(sp, 2, nucs) + r.offset_q2_mhz, sp.j_mhz + r.offset_j_mhz);
        Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
        lambda_ = es.eigenvalues();
        m_ = proc_.eigen().states.adjoint() * es.eigenvectors();
    }

    void apply_piece(DensityMatrix &rho, double t_start, double t_end) {
        // U_I = exp(2 pi i H0 t_end) exp(-2 pi i H (t_end - t_start)) exp(-2 pi i H0 t_start)
        const double d = t_end - t_start;
        CVector a(4), b(4), c(4);
        for (int k = 0; k < 4; ++k) {
            a(k) = std::polar(1.0, kTwoPi * e0_[k] * t_end);
            b(k) = std::polar(1.0, -kTwoPi * lambda_(k) * d);
            c(k) = std::polar(1.0, -kTwoPi * e0_[k] * t_start);
        }
        CMatrix u = a.asDiagonal() * (m_ * b.asDiagonal() * m_.adjoint()) * c.asDiagonal();
        rho = u * rho * u.adjoint();
    }

    const Processor &proc_;
    const NoiseParams &params_;
    NoiseRealization base_;
    std::vector<int> signs_;
    std::vector<int> current_signs_;
    Rng &rng_;
    double e0_[4];
    RVector lambda_;
    CMatrix m_;
};

/// Interaction-frame form of a finite pulse that starts at time t (phase-coherent drive).
Unitary frame_shift(const Processor &proc, const Unitary &u, double t) {
    CVector f(4);
    for (int m = 0; m < 4; ++m) {
        f(m) = std::polar(1.0, kTwoPi * proc.eigen().energies[m] * t);
    }
    return f.asDiagonal() * u * f.conjugate().asDiagonal();
}

std::vector<int> up_indices(Qubit target) {
    return target == Qubit::Q1 ? std::vector<int>{2, 3} : std::vector<int>{1, 3};
}

CoherenceCurve run_sequence(Sequence seq, const std::vector<double> &taus, const SpinSystemParams &spin,
                            const NuclearConfig &nucs, const NoiseParams &noise, const CoherenceOptions &opt,
                            uint64_t seed) {
    opt.validate();
    noise.validate();
    if (taus.empty() || !std::is_sorted(taus.begin(), taus.end()) || taus.front() < 0.0) {
        throw std::invalid_argument("taus must be non-empty, non-negative and sorted");
    }
    ProcessorConfig pc;
    pc.spin = spin;
    pc.nucs = nucs;
    pc.rabi_mhz = opt.rabi_mhz;
    pc.backend = opt.hard_pulses ? GateBackend::Ideal : GateBackend::Pulse;
    Processor proc(pc);

    const ControlCondition cond = opt.control == Spin::Up ? ControlCondition::Up : ControlCondition::Down;
    std::string prep(2, 'd');
    prep[index_of(other(opt.target)) - 1] = opt.control == Spin::Up ? 'u' : 'd';
    const DensityMatrix rho0 = initialize(prep);
    const Confusion conf = opt.target == Qubit::Q2 ? qnd_confusion(opt.readout) : direct_confusion(opt.readout);
    const auto ups = up_indices(opt.target);

    NoiseProcess process(noise, seed, 1);
    Rng outcome_rng = make_stream(seed, 2, 0);
    Rng jump_rng = make_stream(seed, 3, 0);

    const size_t n = taus.size();
    std::vector<double> acc(n, 0.0);
    double t_pi2 = opt.hard_pulses ? 0.0 : proc.duration_us(GateLabel::crot(opt.target, cond, kPi / 2));
    double t_pi = opt.hard_pulses ? 0.0 : proc.duration_us(GateLabel::crot(opt.target, cond, kPi));

    for (int shot = 0; shot < opt.shots; ++shot) {
        NoiseRealization r = process.next();
        const NoiseRealization *rp = &r;
        ShotEvolution ev(proc, noise, r, process.signs(), jump_rng);
        Unitary x90 = proc.gate(GateLabel::crot(opt.target, cond, kPi / 2, 0.0), rp);
        Unitary x180 = seq == Sequence::Hahn ? proc.gate(GateLabel::crot(opt.target, cond, kPi, 0.0), rp) : Unitary();
        for (size_t k = 0; k < n; ++k) {
            const double tau = taus[k];
            const double phase = kTwoPi * opt.detuning_mhz * tau;
            DensityMatrix rho = x90 * rho0 * x90.adjoint();
            double t = t_pi2;
            if (seq == Sequence::Ramsey) {
                ev.wait(rho, t, tau);
                t += tau;
            } else {
                ev.wait(rho, t, 0.5 * tau);
                t += 0.5 * tau;
                Unitary echo = opt.hard_pulses ? x180 : frame_shift(proc, x180, t);
                rho = echo * rho * echo.adjoint();
                t += t_pi;
                ev.wait(rho, t, 0.5 * tau);
                t += 0.5 * tau;
            }
            Unitary last = proc.gate(GateLabel::crot(opt.target, cond, kPi / 2, phase), rp);
            if (!opt.hard_pulses) {
                last = frame_shift(proc, last, t);
            }
            rho = last * rho * last.adjoint();
            double p_true = 0.0;
            for (int i : ups) {
                p_true += rho(i, i).real();
            }
            p_true = std::clamp(p_true, 0.0, 1.0);
            double p_rep = conf.p_up_given_up * p_true + conf.p_up_given_down * (1.0 - p_true);
            if (opt.sample_outcomes) {
                std::bernoulli_distribution outcome(std::clamp(p_rep, 0.0, 1.0));
                acc[k] += outcome(outcome_rng) ? 1.0 : 0.0;
            } else {
                acc[k] += p_rep;
            }
        }
    }

    CoherenceCurve out;
    out.taus_us = taus;
    out.p_up.resize(n);
    out.stderr_p.resize(n);
    for (size_t k = 0; k < n; ++k) {
        double p = acc[k] / opt.shots;
        out.p_up[k] = p;
        out.stderr_p[k] = std::sqrt(std::max(p * (1.0 - p), 0.0) / opt.shots);
    }
    if (n >= 6) {
        out.fit = seq == Sequence::Ramsey ? fit_gaussian_decay(taus, out.p_up, opt.detuning_mhz == 0.0 ? 0.0 : -1.0)
                                          : fit_stretched_decay(taus, out.p_up, std::abs(opt.detuning_mhz));
        out.t2_us = out.fit.decay_time;
    } else {
        out.t2_us = std::numeric_limits<double>::quiet_NaN();
    }
    return out;
}

}  // namespace

CoherenceCurve ramsey_experiment(const std::vector<double> &taus_us, const SpinSystemParams &spin,
                                 const NuclearConfig &nucs, const NoiseParams &noise, const CoherenceOptions &options,
                                 uint64_t seed) {
    return run_sequence(Sequence::Ramsey, taus_us, spin, nucs, noise, options, seed);
}

CoherenceCurve hahn_experiment(const std::vector<double> &taus_us, const SpinSystemParams &spin,
                               const NuclearConfig &nucs, const NoiseParams &noise, const CoherenceOptions &options,
                               uint64_t seed) {
    return run_sequence(Sequence::Hahn, taus_us, spin, nucs, noise, options, seed);
}

}  // namespace donorsim
