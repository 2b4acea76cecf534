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

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "donorsim/gst/budget.h"
#include "donorsim/gst/device.h"
#include "donorsim/gst/suite.h"
#include "donorsim/linalg.h"
#include "gtest/gtest.h"

using namespace donorsim;
using namespace donorsim::gst;

namespace {

const std::vector<std::string> kLabels1q = {"Gi", "Gx", "Gy"};

std::vector<std::string> crot_labels() {
    std::vector<std::string> out = labels_2q();
    out.erase(out.begin());
    return out;
}

double category_sum(const ErrorBudget &b, const std::vector<std::string> &labels, const std::string &category) {
    double s = 0.0;
    for (const auto &l : labels) s += b.at(l).categories.at(category);
    return s;
}

const PairMisalignment &pair_of(const ErrorBudget &b, const std::string &x) {
    for (const auto &p : b.pairs) {
        if (p.x_label == x) return p;
    }
    throw std::out_of_range(x);
}

}  // namespace

TEST(gst_device, ideal_backend_reductions_equal_targets) {
    const GateSet target = target_1q();
    DeviceModel device = DeviceModel::noiseless();
    device.processor.backend = GateBackend::Ideal;
    for (Qubit q : {Qubit::Q1, Qubit::Q2}) {
        for (ControlCondition c : {ControlCondition::Down, ControlCondition::Up}) {
            const GateSet gs = device_gateset_cond(device, q, c, 1);
            for (const auto &l : kLabels1q) EXPECT_LT((gs.gate(l) - target.gate(l)).norm(), 1e-10) << l;
        }
        for (Spectator s : {Spectator::Down, Spectator::Plus, Spectator::Up}) {
            const GateSet gs = device_gateset_uncond(device, q, s, 1);
            for (const auto &l : kLabels1q) EXPECT_LT((gs.gate(l) - target.gate(l)).norm(), 1e-10) << l;
        }
    }
}

TEST(gst_device, noiseless_pulses_are_near_ideal) {
    const GateSet target = target_1q();
    const DeviceModel device = DeviceModel::noiseless();
    for (Qubit q : {Qubit::Q1, Qubit::Q2}) {
        for (ControlCondition c : {ControlCondition::Down, ControlCondition::Up}) {
            const ErrorBudget b = error_budget(device_gateset_cond(device, q, c, 1), target);
            for (const auto &g : b.gates) EXPECT_GT(g.fidelity, 0.9999) << g.label;
        }
    }
}

TEST(gst_device, product_channel_reduces_to_its_factor) {
    const CMatrix a = (CMatrix(2, 2) << Complex(0.6, 0.0), Complex(0.0, 0.8), Complex(0.0, 0.8), Complex(0.6, 0.0))
                          .finished();
    const CMatrix b = (CMatrix(2, 2) << Complex(0.0, 1.0), 0.0, 0.0, Complex(0.0, -1.0)).finished();
    const RMatrix pa = ptm_from_map([&](const CMatrix &r) { return CMatrix(a * r * a.adjoint()); }, 2);
    const RMatrix pb = ptm_from_map([&](const CMatrix &r) { return CMatrix(b * r * b.adjoint()); }, 2);
    const CMatrix ab = kron(a, b);
    const RMatrix p2 = ptm_from_map([&](const CMatrix &r) { return CMatrix(ab * r * ab.adjoint()); }, 4);
    CMatrix plus = CMatrix::Constant(2, 2, 0.5);
    EXPECT_LT((reduce_to_qubit(p2, Qubit::Q1, plus) - pa).norm(), 1e-12);
    EXPECT_LT((reduce_to_qubit(p2, Qubit::Q2, plus) - pb).norm(), 1e-12);
}

TEST(gst_device, validation_names_fields) {
    DeviceModel d = DeviceModel::calibrated();
    d.control_dephasing = -1.0;
    EXPECT_THROW(d.validate(), std::invalid_argument);
    d = DeviceModel::calibrated();
    d.phase_offsets_rad["Gz1u"] = 0.1;
    EXPECT_THROW(d.validate(), std::invalid_argument);
    d = DeviceModel::calibrated();
    d.noise_samples = 0;
    EXPECT_THROW(d.validate(), std::invalid_argument);
    EXPECT_NO_THROW(DeviceModel::miscalibrated().validate());
}

TEST(gst_device, crot_labels_parse) {
    const GateLabel g = crot_for_label("Gy2u");
    EXPECT_EQ(g.target, Qubit::Q2);
    EXPECT_EQ(g.control, ControlCondition::Up);
    EXPECT_NEAR(g.phase, kPi / 2, 1e-15);
    EXPECT_THROW(crot_for_label("Gi"), std::invalid_argument);
    EXPECT_THROW(crot_for_label("Gx3d"), std::invalid_argument);
}

TEST(gst_suite, mode_names_round_trip) {
    for (SuiteMode m : {SuiteMode::Uncond1q, SuiteMode::Cond1q, SuiteMode::TwoQubit}) {
        EXPECT_EQ(parse_suite_mode(suite_mode_name(m)), m);
    }
    EXPECT_THROW(parse_suite_mode("3q"), std::invalid_argument);
}

TEST(gst_suite, noiseless_conditional_fidelities) {
    const SuiteReport r = run_device_suite(SuiteMode::Cond1q, DeviceModel::noiseless(), {}, 3);
    ASSERT_EQ(r.runs.size(), 4u);
    EXPECT_TRUE(r.converged());
    EXPECT_GE(r.min_fidelity(kLabels1q), 0.999);
}

TEST(gst_suite, unconditional_runs_cover_spectators) {
    const SuiteReport r = run_device_suite(SuiteMode::Uncond1q, DeviceModel::calibrated(), {}, 4);
    ASSERT_EQ(r.runs.size(), 6u);
    EXPECT_TRUE(r.converged());
    for (const auto &run : r.runs) {
        for (const auto &l : kLabels1q) {
            EXPECT_NEAR(run.budget.at(l).fidelity, run.truth_budget.at(l).fidelity, 2e-3) << run.name << " " << l;
        }
    }
}

TEST(gst_suite, calibrated_envelope_and_ordering) {
    const DeviceModel device = DeviceModel::calibrated();
    const SuiteReport cond = run_device_suite(SuiteMode::Cond1q, device, {}, 5);
    ASSERT_TRUE(cond.converged());
    EXPECT_GE(cond.min_fidelity(kLabels1q), 0.995);
    EXPECT_LE(cond.max_fidelity(kLabels1q), 0.999);
    const SuiteReport two = run_device_suite(SuiteMode::TwoQubit, device, {}, 5);
    ASSERT_TRUE(two.converged());
    EXPECT_LT(two.max_fidelity(crot_labels()), cond.min_fidelity({"Gx", "Gy"}));
}

TEST(gst_suite, coherent_dominated_incoherent_fractions) {
    const SuiteReport r = run_device_suite(SuiteMode::TwoQubit, DeviceModel::miscalibrated(), {}, 6);
    ASSERT_TRUE(r.converged());
    for (const auto &g : r.runs[0].budget.gates) {
        EXPECT_GE(g.incoherent_fraction, 0.0691) << g.label;
        EXPECT_LE(g.incoherent_fraction, 0.2188) << g.label;
    }
}

TEST(gst_suite, injected_relational_misalignment_is_flagged) {
    const double offset = 0.25;
    DeviceModel device = DeviceModel::miscalibrated();
    device.phase_offsets_rad = {{"Gy1u", offset}};
    device.detuning_offset_q1_mhz = device.detuning_offset_q2_mhz = 0.0;
    const SuiteReport r = run_device_suite(SuiteMode::TwoQubit, device, {}, 7);
    ASSERT_TRUE(r.converged());
    const ErrorBudget &b = r.runs[0].budget;
    EXPECT_NEAR(pair_of(b, "Gx1u").angle_error_rad, offset, 0.1 * offset);
    for (const char *x : {"Gx1d", "Gx2d", "Gx2u"}) EXPECT_LT(std::abs(pair_of(b, x).angle_error_rad), 0.01) << x;
    const std::vector<std::string> pair = {"Gx1u", "Gy1u"};
    const double mis = category_sum(b, pair, "axis misalignment");
    for (const auto &[category, value] : b.at("Gx1u").categories) {
        if (category != "axis misalignment") EXPECT_GT(mis, category_sum(b, pair, category)) << category;
    }
    const std::vector<std::string> clean = {"Gx2u", "Gy2u"};
    EXPECT_LT(category_sum(b, clean, "axis misalignment"), category_sum(b, clean, "control dephasing"));
}
