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

#include "donorsim/gst/design.h"

#include <set>
#include <stdexcept>

namespace donorsim::gst {

GateString concat(const GateString &a, const GateString &b) {
    GateString out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

GateString repeat(const GateString &g, int times) {
    GateString out;
    for (int k = 0; k < times; ++k) out = concat(out, g);
    return out;
}

std::vector<GateString> default_fiducials_1q() {
    return {{}, {"Gx"}, {"Gy"}, {"Gx", "Gx"}, {"Gx", "Gx", "Gx"}, {"Gy", "Gy", "Gy"}};
}

std::vector<GateString> default_germs_1q() {
    return {{"Gi"},
            {"Gx"},
            {"Gy"},
            {"Gx", "Gy"},
            {"Gx", "Gy", "Gi"},
            {"Gx", "Gi", "Gy"},
            {"Gx", "Gi", "Gi"},
            {"Gy", "Gi", "Gi"},
            {"Gx", "Gx", "Gi", "Gy"},
            {"Gx", "Gy", "Gy", "Gi"},
            {"Gx", "Gx", "Gy", "Gx", "Gy", "Gy"}};
}

std::vector<GateString> default_fiducials_2q() {
    auto per_qubit = [](int q) {
        const std::string n = std::to_string(q);
        GateString x = {"Gx" + n + "d", "Gx" + n + "u"};
        GateString y = {"Gy" + n + "d", "Gy" + n + "u"};
        return std::vector<GateString>{{}, x, y, concat(x, x)};
    };
    std::vector<GateString> out;
    for (const auto &a : per_qubit(1)) {
        for (const auto &b : per_qubit(2)) {
            out.push_back(concat(a, b));
        }
    }
    return out;
}

std::vector<GateString> default_germs_2q() {
    std::vector<GateString> out;
    for (const auto &l : labels_2q()) {
        out.push_back({l});
    }
    for (const std::string n : {"1", "2"}) {
        for (const std::string c : {"d", "u"}) {
            out.push_back({"Gx" + n + c, "Gy" + n + c});
        }
        out.push_back({"Gx" + n + "d", "Gx" + n + "u"});
    }
    out.push_back({"Gx1d", "Gy2d"});
    out.push_back({"Gx2u", "Gy1u"});
    out.push_back({"Gi", "Gx1d", "Gy2u"});
    return out;
}

namespace {

int numeric_rank(const RMatrix &m) {
    Eigen::JacobiSVD<RMatrix> svd(m);
    const RVector s = svd.singularValues();
    int r = 0;
    for (int k = 0; k < s.size(); ++k) {
        if (s(k) > 1e-8 * std::max(1.0, s(0))) ++r;
    }
    return r;
}

}  // namespace

int prep_fiducial_rank(const GateSet &target, const std::vector<GateString> &fiducials) {
    RMatrix m(target.ptm_dim(), fiducials.size());
    for (size_t k = 0; k < fiducials.size(); ++k) {
        m.col(k) = target.propagate(fiducials[k]);
    }
    return numeric_rank(m);
}

int meas_fiducial_rank(const GateSet &target, const std::vector<GateString> &fiducials) {
    RMatrix m(fiducials.size() * target.effects.size(), target.ptm_dim());
    int row = 0;
    for (const auto &f : fiducials) {
        RMatrix g = RMatrix::Identity(target.ptm_dim(), target.ptm_dim());
        for (const auto &l : f) g = target.gate(l) * g;
        for (const auto &e : target.effects) {
            m.row(row++) = (e.transpose() * g);
        }
    }
    return numeric_rank(m);
}

GSTDesign design_gst(const GateSet &target, const std::vector<GateString> &prep_fiducials,
                     const std::vector<GateString> &meas_fiducials, const std::vector<GateString> &germs,
                     const std::vector<int> &max_lengths) {
    target.validate();
    if (germs.empty()) {
        throw std::invalid_argument("GST design needs at least one germ");
    }
    if (max_lengths.empty()) {
        throw std::invalid_argument("GST design needs at least one max length");
    }
    for (int l : max_lengths) {
        if (l < 1) throw std::invalid_argument("GST max lengths must be >= 1");
    }
    for (const auto *list : {&prep_fiducials, &meas_fiducials, &germs}) {
        for (const auto &c : *list) {
            for (const auto &l : c) target.gate(l);
        }
    }
    for (const auto &g : germs) {
        if (g.empty()) throw std::invalid_argument("GST germs must be non-empty");
    }
    const int d2 = target.ptm_dim();
    if (prep_fiducial_rank(target, prep_fiducials) < d2) {
        throw std::invalid_argument("preparation fiducials are not informationally complete");
    }
    if (meas_fiducial_rank(target, meas_fiducials) < d2) {
        throw std::invalid_argument("measurement fiducials are not informationally complete");
    }

    GSTDesign d;
    d.num_qubits = target.num_qubits;
    d.prep_fiducials = prep_fiducials;
    d.meas_fiducials = meas_fiducials;
    d.germs = germs;
    d.max_lengths = max_lengths;
    std::set<GateString> seen;
    auto add_all = [&](const GateString &body) {
        for (const auto &fp : prep_fiducials) {
            for (const auto &fm : meas_fiducials) {
                GateString c = concat(concat(fp, body), fm);
                if (seen.insert(c).second) d.circuits.push_back(c);
            }
        }
    };
    add_all({});
    for (int l : max_lengths) {
        for (const auto &g : germs) {
            const int len = static_cast<int>(g.size());
            if (len <= l) add_all(repeat(g, l / len));
        }
        d.stage_ends.push_back(d.circuits.size());
    }
    return d;
}

GSTDesign default_design_1q(const std::vector<int> &max_lengths) {
    return design_gst(target_1q(), default_fiducials_1q(), default_fiducials_1q(), default_germs_1q(), max_lengths);
}

GSTDesign default_design_2q(const std::vector<int> &max_lengths) {
    return design_gst(target_2q(), default_fiducials_2q(), default_fiducials_2q(), default_germs_2q(), max_lengths);
}

}  // namespace donorsim::gst
