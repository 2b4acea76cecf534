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

#ifndef DONORSIM_PULSE_ENGINE_H
#define DONORSIM_PULSE_ENGINE_H

#include <map>
#include <string>
#include <vector>

#include "donorsim/channels.h"
#include "donorsim/linalg.h"
#include "donorsim/spin_model.h"

namespace donorsim {

enum class Qubit { Q1 = 1, Q2 = 2 };
enum class ControlCondition { None, Down, Up };
enum class Axis { X, Y };

inline int index_of(Qubit q) { return static_cast<int>(q); }
inline Qubit other(Qubit q) { return q == Qubit::Q1 ? Qubit::Q2 : Qubit::Q1; }

enum class GateKind { X90, Y90, Idle, CROT, ZCROT };

/// A logical gate. X90 / Y90 are unconditional and lower onto two conditional
/// rotations; CROT is a conditional rotation by `angle` about the equatorial axis
/// at `phase` (0 = X, pi/2 = Y) on `target`, applied when the other electron is in
/// `control`. ZCROT is the zero-controlled CROT (control must be Down).
struct GateLabel {
    GateKind kind = GateKind::Idle;
    Qubit target = Qubit::Q1;
    ControlCondition control = ControlCondition::None;
    double angle = 0.0;
    double phase = 0.0;

    static GateLabel x90(Qubit target);
    static GateLabel y90(Qubit target);
    static GateLabel idle();
    static GateLabel crot(Qubit target, ControlCondition control, double angle, double phase = 0.0);

    void validate() const;
    std::string str() const;
};

using Circuit = std::vector<GateLabel>;

enum class PulseShape { Square };

struct PulseSpec {
    double carrier_mhz = 0.0;
    /// Rabi frequency on the transition nearest the carrier; a pi pulse lasts 1/(2 rabi).
    double rabi_mhz = 0.2;
    double phase_rad = 0.0;
    double duration_us = 0.0;
    PulseShape shape = PulseShape::Square;

    void validate() const;
};

enum class PropagationMode { Rwa, ExactFrame };

struct PropagationOptions {
    PropagationMode mode = PropagationMode::Rwa;
    /// Integrator step as a fraction of the carrier period (exact mode only).
    double step_fraction = 1.0 / 50.0;
    /// Interaction-frame Hamiltonian; the driven Hamiltonian itself when null.
    const Operator *frame = nullptr;
};

/// Propagator of a pulse on a two-electron Hamiltonian (Sz product basis, MHz).
/// The drive couples to Sx1 + Sx2 and its amplitude is set so that the transition
/// nearest the carrier (levels of the frame Hamiltonian) nutates at `rabi`.
/// The result is expressed in the interaction frame of the frame Hamiltonian,
/// so that free evolution under the frame Hamiltonian is the identity.
/// Throws std::runtime_error when exact-mode integration cannot proceed.
Unitary propagate_pulse(const Operator &h, const PulseSpec &pulse, const PropagationOptions &options = {});

/// Two-electron Hamiltonian from explicit electron frequencies and exchange (MHz).
Operator electron_hamiltonian(double nu1_mhz, double nu2_mhz, double j_mhz);

/// Ideal gate in the logical basis |dd>, |du>, |ud>, |uu> (Q1 first, down = 0).
Unitary native_gate(const GateLabel &label);

/// Two conditional pi/2 rotations (control down, then control up) on `target`.
Circuit unconditional_gate(Qubit target, Axis axis);

/// Expands X90 / Y90 into their conditional pairs; other gates pass through.
Circuit lower_circuit(const Circuit &circuit);

enum class GateBackend { Ideal, Pulse };

struct ProcessorConfig {
    SpinSystemParams spin;
    NuclearConfig nucs;
    double rabi_mhz = 0.2;
    GateBackend backend = GateBackend::Ideal;
    PropagationMode mode = PropagationMode::Rwa;
    /// Remove the deterministic frame phases of the noiseless pulse (virtual-Z bookkeeping).
    bool compensate_phases = true;
};

/// Realizes logical gates for a given device configuration.
class Processor {
   public:
    explicit Processor(ProcessorConfig config);

    const ProcessorConfig &config() const { return config_; }
    const EigenSolution &eigen() const { return eigen_; }
    const EsrLines &lines() const { return lines_; }

    /// Logical-basis unitary of one gate, optionally under a noise realization's
    /// frequency offsets. Unconditional gates are composed from their lowering.
    Unitary gate(const GateLabel &label, const NoiseRealization *noise = nullptr) const;
    Unitary circuit_unitary(const Circuit &circuit, const NoiseRealization *noise = nullptr) const;

    /// Wall time of a gate; Idle lasts one pi/2 pulse.
    double duration_us(const GateLabel &label) const;
    PulseSpec pulse_for(const GateLabel &label) const;

   private:
    Unitary raw_pulse_gate(const GateLabel &label, const NoiseRealization *noise) const;

    ProcessorConfig config_;
    EigenSolution eigen_;
    EsrLines lines_;
    Operator h_nominal_;
    mutable std::map<std::string, CVector> compensation_;
};

/// Conjugates `rho` by every gate of the lowered circuit, applying the
/// realization's decoherence channels after each gate.
/// Throws std::invalid_argument on dimension mismatch.
DensityMatrix apply_circuit(const Processor &processor, const Circuit &circuit, const DensityMatrix &rho,
                            const NoiseRealization *noise = nullptr);

}  // namespace donorsim

#endif
