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

#ifndef DONORSIM_GST_DEVICE_H
#define DONORSIM_GST_DEVICE_H

#include <cstdint>
#include <map>
#include <string>

#include "donorsim/gst/gateset.h"
#include "donorsim/noise_models.h"
#include "donorsim/pulse_engine.h"

namespace donorsim::gst {

/// A simulated two-donor device: pulse-level gates, the noise process, and the
/// extra error sources GST is meant to see.
struct DeviceModel {
    ProcessorConfig processor;
    NoiseParams noise;
    /// Lindblad Z-dephasing rate imparted on the control electron by every CROT.
    double control_dephasing = 0.0;
    /// Drive-phase offsets (rad) of individual CROTs, keyed by two-qubit label
    /// ("Gy1u" etc.); they tilt the rotation axis in the equatorial plane.
    std::map<std::string, double> phase_offsets_rad;
    /// Static frequency miscalibration of each electron (MHz), added to every noise realization.
    double detuning_offset_q1_mhz = 0.0;
    double detuning_offset_q2_mhz = 0.0;
    /// Probability of preparing each electron flipped, and of misreading it.
    double prep_error = 0.0;
    double readout_error = 0.0;
    /// Quasi-static noise realizations averaged into every gate.
    int noise_samples = 64;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;

    /// Pulse-level gates with every noise source off.
    static DeviceModel noiseless();
    /// Default calibration: conditional one-qubit fidelities near 0.997, control
    /// dephasing from every CROT, and a small X-Y misalignment of the control-up CROTs.
    static DeviceModel calibrated();
    /// Coherent-dominated variant: stochastic noise at a tenth of calibrated(),
    /// opposite 0.2 rad drive-phase offsets on the X and Y CROTs, and static
    /// detunings of +-0.02 MHz.
    static DeviceModel miscalibrated();
};

enum class Spectator { Down, Plus, Up };

std::string spectator_name(Spectator s);

/// CROT behind a two-qubit label, e.g. "Gx1d" = X90 on Q1 when Q2 is down.
/// Throws std::invalid_argument for "Gi" or unknown labels.
GateLabel crot_for_label(const std::string &label);

/// The nine-gate set of the device as averaged Pauli transfer matrices, with
/// imperfect preparation of |dd> and readout. No unitaries are attached.
GateSet device_gateset_2q(const DeviceModel &device, uint64_t seed);

/// One-qubit set {Gi, Gx, Gy} on `target` using the CROTs conditioned on
/// `control`, with the other electron held in that eigenstate.
GateSet device_gateset_cond(const DeviceModel &device, Qubit target, ControlCondition control, uint64_t seed);

/// One-qubit set on `target` whose X / Y gates are two sequential CROTs, with the
/// other electron prepared in `spectator` before every gate.
GateSet device_gateset_uncond(const DeviceModel &device, Qubit target, Spectator spectator, uint64_t seed);

/// Reduced one-qubit channel Tr_other[G(rho (x) sigma)] of a two-qubit PTM.
RMatrix reduce_to_qubit(const RMatrix &ptm2, Qubit target, const CMatrix &other_state);

}  // namespace donorsim::gst

#endif
