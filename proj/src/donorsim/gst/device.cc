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

#include "donorsim/gst/device.h"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace donorsim::gst {

void DeviceModel::validate() const {
    processor.spin.validate();
    noise.validate();
    if (!(control_dephasing >= 0.0) || !std::isfinite(control_dephasing)) {
        throw std::invalid_argument("control_dephasing must be non-negative");
    }
    if (!(prep_error >= 0.0 && prep_error < 0.5)) {
        throw std::invalid_argument("prep_error must lie in [0, 0.5)");
    }
    if (!(readout_error >= 0.0 && readout_error < 0.5)) {
        throw std::invalid_argument("readout_error must lie in [0, 0.5)");
    }
    if (!std::isfinite(detuning_offset_q1_mhz) || !std::isfinite(detuning_offset_q2_mhz)) {
        throw std::invalid_argument("detuning offsets must be finite");
    }
    if (noise_samples < 1) {
        throw std::invalid_argument("noise_samples must be at least 1");
    }
    for (const auto &[label, phase] : phase_offsets_rad) {
        crot_for_label(label);
        if (!std::isfinite(phase)) {
            throw std::invalid_argument("phase_offsets_rad." + label + " must be finite");
        }
    }
}

DeviceModel DeviceModel::noiseless() {
    DeviceModel d;
    d.processor.backend = GateBackend::Pulse;
    d.noise_samples = 1;
    return d;
}

DeviceModel DeviceModel::calibrated() {
    DeviceModel d = noiseless();
    d.noise.sigma_detuning_q1_mhz = 0.004;
    d.noise.sigma_detuning_q2_mhz = 0.004;
    d.noise.t2_hahn_us = 1000.0;
    d.noise.depolarizing_per_gate = 0.005;
    d.noise.idle_depolarizing = 0.005;
    d.control_dephasing = 0.01;
    d.phase_offsets_rad = {{"Gy1u", 0.02}, {"Gy2u", 0.02}};
    d.prep_error = 0.01;
    d.readout_error = 0.02;
    d.noise_samples = 32;
    return d;
}

DeviceModel DeviceModel::miscalibrated() {
    DeviceModel d = calibrated();
    d.noise.sigma_detuning_q1_mhz *= std::sqrt(0.1);
    d.noise.sigma_detuning_q2_mhz *= std::sqrt(0.1);
    d.noise.depolarizing_per_gate *= 0.1;
    d.noise.idle_depolarizing *= 0.1;
    d.control_dephasing *= 0.1;
    d.phase_offsets_rad.clear();
    for (const char *l : {"Gx1d", "Gx1u", "Gx2d", "Gx2u"}) d.phase_offsets_rad[l] = 0.2;
    for (const char *l : {"Gy1d", "Gy1u", "Gy2d", "Gy2u"}) d.phase_offsets_rad[l] = -0.2;
    d.detuning_offset_q1_mhz = 0.02;
    d.detuning_offset_q2_mhz = -0.02;
    return d;
}

std::string spectator_name(Spectator s) {
    switch (s) {
        case Spectator::Down:
            return "down";
        case Spectator::Plus:
            return "plus";
        default:
            return "up";
    }
}

GateLabel crot_for_label(const std::string &label) {
    if (label.size() != 4 || label[0] != 'G' || (label[1] != 'x' && label[1] != 'y') ||
        (label[2] != '1' && label[2] != '2') || (label[3] != 'd' && label[3] != 'u')) {
        throw std::invalid_argument("'" + label + "' is not a conditional rotation label");
    }
    return GateLabel::crot(label[2] == '1' ? Qubit::Q1 : Qubit::Q2,
                           label[3] == 'd' ? ControlCondition::Down : ControlCondition::Up, kPi / 2,
                           label[1] == 'x' ? 0.0 : kPi / 2);
}

namespace {

std::string label_for(Qubit target, ControlCondition control, Axis axis) {
    return std::string("G") + (axis == Axis::X ? 'x' : 'y') + (target == Qubit::Q1 ? '1' : '2') +
           (control == ControlCondition::Down ? 'd' : 'u');
}

/// Averages the PTMs of gate sequences over shared noise realizations.
class GateFactory {
   public:
    GateFactory(const DeviceModel &device, uint64_t seed) : device_(device), processor_(device.processor) {
        device.validate();
        const bool random = device.noise.sigma_detuning_q1_mhz > 0.0 || device.noise.sigma_detuning_q2_mhz > 0.0 ||
                            device.noise.sigma_j_mhz > 0.0 || !device.noise.jumps.empty();
        Rng rng = make_stream(seed, 0x646576);
        const int samples = random ? device.noise_samples : 1;
        for (int k = 0; k < samples; ++k) {
            NoiseRealization r = sample_realization(device.noise, rng);
            r.offset_q1_mhz += device.detuning_offset_q1_mhz;
            r.offset_q2_mhz += device.detuning_offset_q2_mhz;
            realizations_.push_back(r);
        }
    }

    /// Sequence of two-qubit labels ("Gi" or a CROT label) applied in order.
    RMatrix ptm(const std::vector<std::string> &sequence) const {
        RMatrix acc = RMatrix::Zero(16, 16);
        for (const auto &noise : realizations_) {
            acc += ptm_from_map([&](const CMatrix &rho) { return apply(sequence, rho, noise); }, 4);
        }
        return acc / static_cast<double>(realizations_.size());
    }

   private:
    CMatrix apply(const std::vector<std::string> &sequence, CMatrix rho, const NoiseRealization &noise) const {
        for (const auto &l : sequence) {
            GateLabel g = GateLabel::idle();
            if (l != "Gi") {
                g = crot_for_label(l);
                auto it = device_.phase_offsets_rad.find(l);
                if (it != device_.phase_offsets_rad.end()) g.phase += it->second;
            }
            const Unitary u = processor_.gate(g, &noise);
            rho = u * rho * u.adjoint();
            const bool idle = g.kind == GateKind::Idle;
            rho = apply_decoherence(rho, noise.rates, processor_.duration_us(g),
                                    idle ? noise.rates.idle_depolarizing : noise.rates.depolarizing_per_gate);
            if (!idle && device_.control_dephasing > 0.0) {
                rho = dephasing_generator_channel(device_.control_dephasing).on_qubit(index_of(other(g.target))).apply(rho);
            }
        }
        return rho;
    }

    const DeviceModel &device_;
    Processor processor_;
    std::vector<NoiseRealization> realizations_;
};

CMatrix flip_mixture(double p) {
    CMatrix m = CMatrix::Zero(2, 2);
    m(0, 0) = 1.0 - p;
    m(1, 1) = p;
    return m;
}

CMatrix spectator_state(Spectator s) {
    CMatrix m = CMatrix::Zero(2, 2);
    switch (s) {
        case Spectator::Down:
            m(0, 0) = 1.0;
            break;
        case Spectator::Up:
            m(1, 1) = 1.0;
            break;
        case Spectator::Plus:
            m.setConstant(0.5);
            break;
    }
    return m;
}

CMatrix control_state(ControlCondition c) {
    return spectator_state(c == ControlCondition::Up ? Spectator::Up : Spectator::Down);
}

GateSet one_qubit_set(const DeviceModel &device, const GateFactory &factory, Qubit target, const CMatrix &other_state,
                      const std::vector<std::string> &x, const std::vector<std::string> &y) {
    GateSet gs = target_1q();
    gs.unitaries.clear();
    gs.gates["Gi"] = reduce_to_qubit(factory.ptm({"Gi"}), target, other_state);
    gs.gates["Gx"] = reduce_to_qubit(factory.ptm(x), target, other_state);
    gs.gates["Gy"] = reduce_to_qubit(factory.ptm(y), target, other_state);
    gs.rho = state_to_ptm(flip_mixture(device.prep_error));
    gs.effects = {state_to_ptm(flip_mixture(device.readout_error)),
                  state_to_ptm(flip_mixture(1.0 - device.readout_error))};
    return gs;
}

}  // namespace

RMatrix reduce_to_qubit(const RMatrix &ptm2, Qubit target, const CMatrix &other_state) {
    if (ptm2.rows() != 16 || ptm2.cols() != 16 || other_state.rows() != 2 || other_state.cols() != 2) {
        throw std::invalid_argument("reduce_to_qubit expects a 16x16 PTM and a 2x2 state");
    }
    const bool q1 = target == Qubit::Q1;
    RMatrix out(4, 4);
    for (int j = 0; j < 4; ++j) {
        const CMatrix in = q1 ? kron(pauli(j), other_state) : kron(other_state, pauli(j));
        const CMatrix rho = ptm_to_state(ptm2 * state_to_ptm(in / std::sqrt(2.0)));
        CMatrix reduced = CMatrix::Zero(2, 2);
        for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
                for (int k = 0; k < 2; ++k) {
                    reduced(a, b) += q1 ? rho(2 * a + k, 2 * b + k) : rho(2 * k + a, 2 * k + b);
                }
            }
        }
        out.col(j) = state_to_ptm(reduced);
    }
    return out;
}

GateSet device_gateset_2q(const DeviceModel &device, uint64_t seed) {
    GateFactory factory(device, seed);
    GateSet gs = target_2q();
    gs.unitaries.clear();
    for (const auto &l : gs.labels) gs.gates[l] = factory.ptm({l});
    gs.rho = state_to_ptm(kron(flip_mixture(device.prep_error), flip_mixture(device.prep_error)));
    const CMatrix e[2] = {flip_mixture(device.readout_error), flip_mixture(1.0 - device.readout_error)};
    for (int k = 0; k < 4; ++k) gs.effects[k] = state_to_ptm(kron(e[k / 2], e[k % 2]));
    return gs;
}

GateSet device_gateset_cond(const DeviceModel &device, Qubit target, ControlCondition control, uint64_t seed) {
    if (control == ControlCondition::None) {
        throw std::invalid_argument("conditional GST needs a control condition");
    }
    GateFactory factory(device, seed);
    return one_qubit_set(device, factory, target, control_state(control), {label_for(target, control, Axis::X)},
                         {label_for(target, control, Axis::Y)});
}

GateSet device_gateset_uncond(const DeviceModel &device, Qubit target, Spectator spectator, uint64_t seed) {
    GateFactory factory(device, seed);
    std::vector<std::string> x, y;
    for (const auto &g : unconditional_gate(target, Axis::X)) x.push_back(label_for(target, g.control, Axis::X));
    for (const auto &g : unconditional_gate(target, Axis::Y)) y.push_back(label_for(target, g.control, Axis::Y));
    return one_qubit_set(device, factory, target, spectator_state(spectator), x, y);
}

}  // namespace donorsim::gst
