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

#include "donorsim/gst/gateset.h"

#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "donorsim/pulse_engine.h"

namespace donorsim::gst {

std::string circuit_str(const GateString &circuit) {
    if (circuit.empty()) {
        return "{}";
    }
    std::string out;
    for (size_t k = 0; k < circuit.size(); ++k) {
        if (k) out += '.';
        out += circuit[k];
    }
    return out;
}

GateString parse_circuit(const std::string &text) {
    if (text == "{}") {
        return {};
    }
    GateString out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, '.')) {
        if (item.empty() || item[0] != 'G') {
            throw std::invalid_argument("malformed circuit '" + text + "'");
        }
        for (char c : item) {
            if (!std::isalnum(static_cast<unsigned char>(c))) {
                throw std::invalid_argument("malformed circuit '" + text + "'");
            }
        }
        out.push_back(item);
    }
    if (out.empty() || text.back() == '.') {
        throw std::invalid_argument("malformed circuit '" + text + "'");
    }
    return out;
}

const RMatrix &GateSet::gate(const std::string &label) const {
    auto it = gates.find(label);
    if (it == gates.end()) {
        throw std::invalid_argument("gate set has no gate '" + label + "'");
    }
    return it->second;
}

RVector GateSet::propagate(const GateString &circuit) const {
    RVector v = rho;
    for (const auto &g : circuit) {
        v = gate(g) * v;
    }
    return v;
}

RVector GateSet::probabilities(const GateString &circuit) const {
    RVector v = propagate(circuit);
    RVector p(effects.size());
    for (size_t k = 0; k < effects.size(); ++k) {
        p(k) = effects[k].dot(v);
    }
    return p;
}

void GateSet::validate() const {
    const int n = ptm_dim();
    if (num_qubits < 1 || num_qubits > 2) {
        throw std::invalid_argument("gate sets support one or two qubits");
    }
    if (rho.size() != n) {
        throw std::invalid_argument("preparation vector has the wrong dimension");
    }
    if (effects.size() < 2) {
        throw std::invalid_argument("gate set needs at least two effects");
    }
    for (const auto &e : effects) {
        if (e.size() != n) {
            throw std::invalid_argument("effect vector has the wrong dimension");
        }
    }
    if (labels.size() != gates.size()) {
        throw std::invalid_argument("gate labels and gates disagree");
    }
    for (const auto &l : labels) {
        const RMatrix &g = gate(l);
        if (g.rows() != n || g.cols() != n) {
            throw std::invalid_argument("gate '" + l + "' has the wrong dimension");
        }
    }
}

namespace {

CMatrix projector(int dim, int index) {
    CMatrix p = CMatrix::Zero(dim, dim);
    p(index, index) = 1.0;
    return p;
}

/// Restricts a two-electron unitary to Q1 with Q2 held in `control`.
CMatrix restrict_q1(const CMatrix &u, int control) {
    CMatrix out(2, 2);
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) out(a, b) = u(2 * a + control, 2 * b + control);
    return out;
}

}  // namespace

GateSet target_1q() {
    GateSet gs;
    gs.num_qubits = 1;
    gs.labels = {"Gi", "Gx", "Gy"};
    const CMatrix ux = restrict_q1(native_gate(GateLabel::crot(Qubit::Q1, ControlCondition::Down, kPi / 2, 0.0)), 0);
    const CMatrix uy =
        restrict_q1(native_gate(GateLabel::crot(Qubit::Q1, ControlCondition::Down, kPi / 2, kPi / 2)), 0);
    gs.unitaries = {{"Gi", identity(2)}, {"Gx", ux}, {"Gy", uy}};
    for (const auto &[l, u] : gs.unitaries) {
        gs.gates[l] = ptm_from_unitary(u);
    }
    gs.rho = state_to_ptm(projector(2, 0));
    gs.effects = {state_to_ptm(projector(2, 0)), state_to_ptm(projector(2, 1))};
    return gs;
}

std::vector<std::string> labels_2q() {
    return {"Gi", "Gx1d", "Gx1u", "Gy1d", "Gy1u", "Gx2d", "Gx2u", "Gy2d", "Gy2u"};
}

GateSet target_2q() {
    GateSet gs;
    gs.num_qubits = 2;
    gs.labels = labels_2q();
    gs.unitaries["Gi"] = identity(4);
    for (int t = 1; t <= 2; ++t) {
        for (char axis : {'x', 'y'}) {
            for (char c : {'d', 'u'}) {
                GateLabel g = GateLabel::crot(t == 1 ? Qubit::Q1 : Qubit::Q2,
                                              c == 'd' ? ControlCondition::Down : ControlCondition::Up, kPi / 2,
                                              axis == 'x' ? 0.0 : kPi / 2);
                gs.unitaries[std::string("G") + axis + std::to_string(t) + c] = native_gate(g);
            }
        }
    }
    for (const auto &[l, u] : gs.unitaries) {
        gs.gates[l] = ptm_from_unitary(u);
    }
    gs.rho = state_to_ptm(projector(4, 0));
    for (int k = 0; k < 4; ++k) {
        gs.effects.push_back(state_to_ptm(projector(4, k)));
    }
    return gs;
}

double entanglement_fidelity(const RMatrix &gate, const RMatrix &target) {
    const double d2 = static_cast<double>(gate.rows());
    return (target.inverse() * gate).trace() / d2;
}

double choi_min_eigenvalue(const RMatrix &ptm) { return min_eigenvalue(choi_from_ptm(ptm)); }

bool is_tp(const RMatrix &ptm, double tol) {
    RVector row = ptm.row(0).transpose();
    row(0) -= 1.0;
    return row.cwiseAbs().maxCoeff() <= tol;
}

bool is_cptp(const RMatrix &ptm, double tol) { return is_tp(ptm, tol) && choi_min_eigenvalue(ptm) >= -tol; }

double average_gate_fidelity(const RMatrix &gate, const RMatrix &target) {
    if (choi_min_eigenvalue(gate) < -1e-8 || choi_min_eigenvalue(target) < -1e-8) {
        throw std::invalid_argument("average_gate_fidelity requires completely positive maps");
    }
    const double d = std::sqrt(static_cast<double>(gate.rows()));
    return (d * entanglement_fidelity(gate, target) + 1.0) / (d + 1.0);
}

}  // namespace donorsim::gst
