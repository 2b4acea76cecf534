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

#ifndef DONORSIM_GST_DESIGN_H
#define DONORSIM_GST_DESIGN_H

#include <vector>

#include "donorsim/gst/gateset.h"

namespace donorsim::gst {

struct GSTDesign {
    int num_qubits = 1;
    std::vector<GateString> prep_fiducials;
    std::vector<GateString> meas_fiducials;
    std::vector<GateString> germs;
    std::vector<int> max_lengths;
    /// Fiducial pairs around the empty germ first, then germ powers by length.
    std::vector<GateString> circuits;
    /// circuits[0, stage_ends[i]) covers every germ power up to max_lengths[i].
    std::vector<size_t> stage_ends;
};

/// {}, Gx, Gy, Gx.Gx, Gx.Gx.Gx, Gy.Gy.Gy
std::vector<GateString> default_fiducials_1q();
/// The standard X/Y/I germ set: Gi, Gx, Gy, Gx.Gy, Gx.Gy.Gi, Gx.Gi.Gy, Gx.Gi.Gi,
/// Gy.Gi.Gi, Gx.Gx.Gi.Gy, Gx.Gy.Gy.Gi, Gx.Gx.Gy.Gx.Gy.Gy.
std::vector<GateString> default_germs_1q();
/// Products of the per-qubit fiducials {}, X, Y, X.X, where an unconditional
/// X on Qn is Gxnd.Gxnu. Q1 fiducial first.
std::vector<GateString> default_fiducials_2q();
/// All nine gates plus X/Y pairs on each conditional configuration and a few
/// cross-target products.
std::vector<GateString> default_germs_2q();

/// Germ g contributes g^(L / |g|) for every L >= |g|.
/// Throws std::invalid_argument on empty germs or lengths, unknown labels, or
/// fiducials that fail the rank test.
GSTDesign design_gst(const GateSet &target, const std::vector<GateString> &prep_fiducials,
                     const std::vector<GateString> &meas_fiducials, const std::vector<GateString> &germs,
                     const std::vector<int> &max_lengths);
GSTDesign default_design_1q(const std::vector<int> &max_lengths = {1, 2, 4, 8, 16});
GSTDesign default_design_2q(const std::vector<int> &max_lengths = {1, 2, 4});

/// Rank of the prepared fiducial states in Pauli space.
int prep_fiducial_rank(const GateSet &target, const std::vector<GateString> &fiducials);
/// Rank of the fiducial-rotated measurement effects in Pauli space.
int meas_fiducial_rank(const GateSet &target, const std::vector<GateString> &fiducials);

GateString concat(const GateString &a, const GateString &b);
GateString repeat(const GateString &g, int times);

}  // namespace donorsim::gst

#endif
