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

#include "donorsim/pulse_engine.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace donorsim {

namespace {

struct TotalSpin {
    CMatrix sx, sy, sz;
};

const TotalSpin &total_spin() {
    static const TotalSpin ts = [] {
        const std::vector<int> dims{2, 2};
        return TotalSpin{embed(spin_x(), 0, dims) + embed(spin_x(), 1, dims),
                         embed(spin_y(), 0, dims) + embed(spin_y(), 1, dims),
                         embed(spin_z(), 0, dims) + embed(spin_z(), 1, dims)};
    }();
    return ts;
}

CMatrix rotation(double angle, double phase) {
    return std::cos(0.5 * angle) * identity(2) -
           kI * std::sin(0.5 * angle) * (std::cos(phase) * pauli(1) + std::sin(phase) * pauli(2));
}

CMatrix projector(int spin_index) {
    CMatrix p = CMatrix::Zero(2, 2);
    p(spin_index, spin_index) = 1.0;
    return p;
}

/// Target rotation conditioned on the control qubit being in `control_index`.
CMatrix conditional(const CMatrix &r, Qubit target, int control_index) {
    CMatrix pc = projector(control_index);
    CMatrix qc = identity(2) - pc;
    if (target == Qubit::Q1) {
        return kron(r, pc) + kron(identity(2), qc);
    }
    return kron(pc, r) + kron(qc, identity(2));
}

CMatrix on_target(const CMatrix &r, Qubit target) {
    return target == Qubit::Q1 ? kron(r, identity(2)) : kron(identity(2), r);
}

void polar_orthonormalize(CMatrix &u) {
    Eigen::JacobiSVD<CMatrix> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
    u = svd.matrixU() * svd.matrixV().adjoint();
}

}  // namespace

GateLabel GateLabel::x90(Qubit target) {
    return GateLabel{GateKind::X90, target, ControlCondition::None, kPi / 2, 0.0};
}

GateLabel GateLabel::y90(Qubit target) {
    return GateLabel{GateKind::Y90, target, ControlCondition::None, kPi / 2, kPi / 2};
}

GateLabel GateLabel::idle() {
    return GateLabel{GateKind::Idle, Qubit::Q1, ControlCondition::None, 0.0, 0.0};
}

GateLabel GateLabel::crot(Qubit target, ControlCondition control, double angle, double phase) {
    return GateLabel{GateKind::CROT, target, control, angle, phase};
}

void GateLabel::validate() const {
    switch (kind) {
        case GateKind::X90:
        case GateKind::Y90:
        case GateKind::Idle:
            if (control != ControlCondition::None) {
                throw std::invalid_argument("unconditional gate must not carry a control condition");
            }
            break;
        case GateKind::CROT:
            if (control == ControlCondition::None) {
                throw std::invalid_argument("CROT requires a control condition");
            }
            break;
        case GateKind::ZCROT:
            if (control != ControlCondition::Down) {
                throw std::invalid_argument("zCROT is conditioned on the control being down");
            }
            break;
        default:
            throw std::invalid_argument("unknown gate kind");
    }
    if (!std::isfinite(angle) || !std::isfinite(phase)) {
        throw std::invalid_argument("gate angle and phase must be finite");
    }
}

std::string GateLabel::str() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind) {
        case GateKind::X90:
            os << "X90:Q" << index_of(target);
            break;
        case GateKind::Y90:
            os << "Y90:Q" << index_of(target);
            break;
        case GateKind::Idle:
            os << "Idle";
            break;
        case GateKind::CROT:
        case GateKind::ZCROT:
            os << (kind == GateKind::CROT ? "CROT" : "zCROT") << "(" << angle << "," << phase << "):Q"
               << index_of(target) << "|" << (control == ControlCondition::Up ? "u" : "d");
            break;
    }
    return os.str();
}

void PulseSpec::validate() const {
    if (!(rabi_mhz > 0.0) || !std::isfinite(rabi_mhz)) {
        throw std::invalid_argument("pulse rabi frequency must be positive");
    }
    if (!(duration_us >= 0.0) || !std::isfinite(duration_us)) {
        throw std::invalid_argument("pulse duration must be non-negative");
    }
    if (!std::isfinite(carrier_mhz) || !std::isfinite(phase_rad)) {
        throw std::invalid_argument("pulse carrier and phase must be finite");
    }
}

Operator electron_hamiltonian(double nu1_mhz, double nu2_mhz, double j_mhz) {
    const std::vector<int> dims{2, 2};
    auto op = [&](const CMatrix &m, int site) { return embed(m, site, dims); };
    Operator h = nu1_mhz * op(spin_z(), 0) + nu2_mhz * op(spin_z(), 1);
    h += j_mhz * (op(spin_x(), 0) * op(spin_x(), 1) + op(spin_y(), 0) * op(spin_y(), 1) +
                  op(spin_z(), 0) * op(spin_z(), 1));
    return h;
}

Unitary propagate_pulse(const Operator &h, const PulseSpec &pulse, const PropagationOptions &options) {
    pulse.validate();
    if (h.rows() != 4 || h.cols() != 4) {
        throw std::invalid_argument("propagate_pulse expects a 4x4 two-electron Hamiltonian");
    }
    const Operator &frame = options.frame ? *options.frame : h;
    if (pulse.duration_us == 0.0) {
        return identity(4);
    }
    const TotalSpin &ts = total_spin();

    // Coupling of the transition nearest the carrier sets the drive amplitude.
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (frame + frame.adjoint()));
    CMatrix sx_eig = es.eigenvectors().adjoint() * ts.sx * es.eigenvectors();
    double best_detuning = std::numeric_limits<double>::infinity();
    double coupling = 0.0;
    for (int a = 0; a < 4; ++a) {
        for (int b = a + 1; b < 4; ++b) {
            double m = std::abs(sx_eig(b, a));
            if (m < 1e-9) {
                continue;
            }
            double f = std::abs(es.eigenvalues()(b) - es.eigenvalues()(a));
            double det = std::abs(f - pulse.carrier_mhz);
            if (det < best_detuning) {
                best_detuning = det;
                coupling = m;
            }
        }
    }
    if (coupling == 0.0) {
        throw std::runtime_error("no allowed transition to drive");
    }
    const double b1 = pulse.rabi_mhz / (2.0 * coupling);
    const double f = pulse.carrier_mhz;
    const double t = pulse.duration_us;
    const CMatrix drive_dir = std::cos(pulse.phase_rad) * ts.sx + std::sin(pulse.phase_rad) * ts.sy;

    CMatrix u_lab;
    if (options.mode == PropagationMode::Rwa) {
        Operator h_rot = h - f * ts.sz + b1 * drive_dir;
        u_lab = evolve(f * ts.sz, t) * evolve(h_rot, t);
    } else {
        if (!(f > 0.0) || !(options.step_fraction > 0.0)) {
            throw std::runtime_error("exact-frame integration needs a positive carrier and step");
        }
        const double steps_d = std::ceil(t * f / options.step_fraction);
        if (steps_d > 5e8) {
            throw std::runtime_error("exact-frame integration would need too many steps");
        }
        const long steps = std::max(1L, static_cast<long>(steps_d));
        const double dt = t / static_cast<double>(steps);
        u_lab = identity(4);
        for (long k = 0; k < steps; ++k) {
            const double tm = (static_cast<double>(k) + 0.5) * dt;
            Operator hk = h + 2.0 * b1 * std::cos(kTwoPi * f * tm + pulse.phase_rad) * ts.sx;
            u_lab = evolve(hk, dt) * u_lab;
            if ((k + 1) % 4096 == 0) {
                polar_orthonormalize(u_lab);
            }
        }
        polar_orthonormalize(u_lab);
        if (!u_lab.allFinite()) {
            throw std::runtime_error("exact-frame integration diverged");
        }
    }
    return evolve(frame, -t) * u_lab;
}

Unitary native_gate(const GateLabel &label) {
    label.validate();
    switch (label.kind) {
        case GateKind::Idle:
            return identity(4);
        case GateKind::X90:
        case GateKind::Y90:
            return on_target(rotation(label.angle, label.phase), label.target);
        case GateKind::CROT:
        case GateKind::ZCROT:
            return conditional(rotation(label.angle, label.phase), label.target,
                               label.control == ControlCondition::Up ? 1 : 0);
    }
    throw std::invalid_argument("unknown gate label");
}

Circuit unconditional_gate(Qubit target, Axis axis) {
    const double phase = axis == Axis::X ? 0.0 : kPi / 2;
    return {GateLabel::crot(target, ControlCondition::Down, kPi / 2, phase),
            GateLabel::crot(target, ControlCondition::Up, kPi / 2, phase)};
}

Circuit lower_circuit(const Circuit &circuit) {
    Circuit out;
    for (const auto &g : circuit) {
        g.validate();
        if (g.kind == GateKind::X90 || g.kind == GateKind::Y90) {
            for (auto c : {ControlCondition::Down, ControlCondition::Up}) {
                out.push_back(GateLabel::crot(g.target, c, g.angle, g.phase));
            }
        } else {
            out.push_back(g);
        }
    }
    return out;
}

Processor::Processor(ProcessorConfig config) : config_(std::move(config)) {
    config_.spin.validate();
    if (!(config_.rabi_mhz > 0.0)) {
        throw std::invalid_argument("processor rabi frequency must be positive");
    }
    eigen_ = eigenstates(config_.spin, config_.nucs);
    lines_ = esr_frequencies(config_.spin, config_.nucs);
    h_nominal_ = effective_electron_hamiltonian(config_.spin, config_.nucs);
}

double Processor::duration_us(const GateLabel &label) const {
    const double pi2 = 1.0 / (4.0 * config_.rabi_mhz);
    switch (label.kind) {
        case GateKind::Idle:
            return pi2;
        case GateKind::X90:
        case GateKind::Y90:
            return 2.0 * std::abs(label.angle) / (kTwoPi * config_.rabi_mhz);
        default:
            return std::abs(label.angle) / (kTwoPi * config_.rabi_mhz);
    }
}

PulseSpec Processor::pulse_for(const GateLabel &label) const {
    if (label.kind != GateKind::CROT && label.kind != GateKind::ZCROT) {
        throw std::invalid_argument("pulse_for expects a conditional rotation");
    }
    const bool up = label.control == ControlCondition::Up;
    const int t = index_of(label.target);
    double carrier = t == 1 ? (up ? lines_.q1_c_up : lines_.q1_c_down) : (up ? lines_.q2_c_up : lines_.q2_c_down);
    PulseSpec p;
    p.carrier_mhz = carrier;
    p.rabi_mhz = config_.rabi_mhz;
    p.phase_rad = label.angle >= 0.0 ? label.phase : label.phase + kPi;
    p.duration_us = std::abs(label.angle) / (kTwoPi * config_.rabi_mhz);
    return p;
}

Unitary Processor::raw_pulse_gate(const GateLabel &label, const NoiseRealization *noise) const {
    const double nu1 = electron_frequency(config_.spin, 1, config_.nucs);
    const double nu2 = electron_frequency(config_.spin, 2, config_.nucs);
    Operator h = noise ? electron_hamiltonian(nu1 + noise->offset_q1_mhz, nu2 + noise->offset_q2_mhz,
                                              config_.spin.j_mhz + noise->offset_j_mhz)
                       : h_nominal_;
    const CMatrix &v = eigen_.states;
    if (label.kind == GateKind::Idle) {
        const double t = duration_us(label);
        return v.adjoint() * evolve(h_nominal_, -t) * evolve(h, t) * v;
    }
    PropagationOptions opts;
    opts.mode = config_.mode;
    opts.frame = &h_nominal_;
    return v.adjoint() * propagate_pulse(h, pulse_for(label), opts) * v;
}

Unitary Processor::gate(const GateLabel &label, const NoiseRealization *noise) const {
    label.validate();
    if (config_.backend == GateBackend::Ideal) {
        return native_gate(label);
    }
    if (label.kind == GateKind::X90 || label.kind == GateKind::Y90) {
        return circuit_unitary(lower_circuit({label}), noise);
    }
    Unitary u = raw_pulse_gate(label, noise);
    if (config_.compensate_phases && label.kind != GateKind::Idle) {
        const std::string key = label.str();
        auto it = compensation_.find(key);
        if (it == compensation_.end()) {
            Unitary ideal = native_gate(label);
            Unitary raw = raw_pulse_gate(label, nullptr);
            CMatrix m = ideal * raw.adjoint();
            CVector d(4);
            for (int k = 0; k < 4; ++k) {
                d(k) = std::polar(1.0, std::arg(m(k, k)));
            }
            it = compensation_.emplace(key, d).first;
        }
        u = it->second.asDiagonal() * u;
    }
    return u;
}

Unitary Processor::circuit_unitary(const Circuit &circuit, const NoiseRealization *noise) const {
    Unitary u = identity(4);
    for (const auto &g : lower_circuit(circuit)) {
        u = gate(g, noise) * u;
    }
    return u;
}

DensityMatrix apply_circuit(const Processor &processor, const Circuit &circuit, const DensityMatrix &rho,
                            const NoiseRealization *noise) {
    if (rho.rows() != 4 || rho.cols() != 4) {
        throw std::invalid_argument("apply_circuit expects a 4x4 density matrix");
    }
    DensityMatrix out = rho;
    for (const auto &g : lower_circuit(circuit)) {
        Unitary u = processor.gate(g, noise);
        out = u * out * u.adjoint();
        if (noise) {
            const bool idle = g.kind == GateKind::Idle;
            out = apply_decoherence(out, noise->rates, processor.duration_us(g),
                                    idle ? noise->rates.idle_depolarizing : noise->rates.depolarizing_per_gate);
        }
    }
    return out;
}

}  // namespace donorsim
