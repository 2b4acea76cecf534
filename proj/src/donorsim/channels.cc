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

#include "donorsim/channels.h"

#include <cmath>
#include <stdexcept>

namespace donorsim {

CMatrix Channel::apply(const CMatrix &rho) const {
    CMatrix out = CMatrix::Zero(rho.rows(), rho.cols());
    for (const auto &k : kraus) {
        out += k * rho * k.adjoint();
    }
    return out;
}

Channel Channel::on_qubit(int qubit) const {
    if (dim() != 2) {
        throw std::invalid_argument("on_qubit requires a single-qubit channel");
    }
    if (qubit != 1 && qubit != 2) {
        throw std::invalid_argument("qubit must be 1 or 2");
    }
    Channel out;
    for (const auto &k : kraus) {
        out.kraus.push_back(embed(k, qubit - 1, {2, 2}));
    }
    return out;
}

Channel channel(ChannelKind kind, double rate, double duration) {
    if (!(rate >= 0.0) || !(duration >= 0.0)) {
        throw std::invalid_argument("channel rate and duration must be non-negative");
    }
    const double decay = std::exp(-rate * duration);
    Channel ch;
    switch (kind) {
        case ChannelKind::T1: {
            const double gamma = 1.0 - decay;
            CMatrix k0 = CMatrix::Zero(2, 2), k1 = CMatrix::Zero(2, 2);
            k0(0, 0) = 1.0;
            k0(1, 1) = std::sqrt(decay);
            k1(0, 1) = std::sqrt(gamma);
            ch.kraus = {k0, k1};
            break;
        }
        case ChannelKind::T2: {
            const double p = 0.5 * (1.0 - decay);
            ch.kraus = {std::sqrt(1.0 - p) * identity(2), std::sqrt(p) * pauli(3)};
            break;
        }
        case ChannelKind::Depolarizing:
            return depolarizing_channel(1.0 - decay, 2);
    }
    return ch;
}

Channel depolarizing_channel(double p, int dim) {
    if (!(p >= 0.0) || p > 1.0 + 1e-15) {
        throw std::invalid_argument("depolarizing probability must be in [0, 1]");
    }
    const auto &basis = pauli_basis(num_qubits_for_dim(dim));
    const double d2 = static_cast<double>(basis.size());
    Channel ch;
    ch.kraus.push_back(std::sqrt(std::max(0.0, 1.0 - p * (d2 - 1.0) / d2)) * basis[0]);
    if (p > 0.0) {
        for (size_t k = 1; k < basis.size(); ++k) {
            ch.kraus.push_back(std::sqrt(p / d2) * basis[k]);
        }
    }
    return ch;
}

Channel dephasing_generator_channel(double rate) {
    if (!(rate >= 0.0)) {
        throw std::invalid_argument("dephasing rate must be non-negative");
    }
    // exp(r S_Z) scales X, Y components by exp(-2r).
    const double p = 0.5 * (1.0 - std::exp(-2.0 * rate));
    return Channel{{std::sqrt(1.0 - p) * identity(2), std::sqrt(p) * pauli(3)}};
}

CMatrix apply_decoherence(const CMatrix &rho, const ChannelRates &rates, double duration_us,
                          double depolarizing_p) {
    CMatrix out = rho;
    if (duration_us > 0.0) {
        if (std::isfinite(rates.t1_s) && rates.t1_s > 0.0) {
            Channel t1 = channel(ChannelKind::T1, 1.0 / (rates.t1_s * 1e6), duration_us);
            out = t1.on_qubit(1).apply(out);
            out = t1.on_qubit(2).apply(out);
        }
        if (std::isfinite(rates.t2_us) && rates.t2_us > 0.0) {
            Channel t2 = channel(ChannelKind::T2, 1.0 / rates.t2_us, duration_us);
            out = t2.on_qubit(1).apply(out);
            out = t2.on_qubit(2).apply(out);
        }
    }
    if (depolarizing_p > 0.0) {
        out = depolarizing_channel(depolarizing_p, static_cast<int>(rho.rows())).apply(out);
    }
    return out;
}

}  // namespace donorsim
