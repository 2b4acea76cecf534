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

#ifndef DONORSIM_GST_ESTIMATE_H
#define DONORSIM_GST_ESTIMATE_H

#include <map>
#include <optional>
#include <string>

#include "donorsim/gst/dataset.h"
#include "donorsim/gst/lindblad.h"

namespace donorsim::gst {

/// Gates exp(L(h, s)) G_target with s >= 0 (so the map is CPTP), a trace-one
/// preparation vector, and effects whose last member completes the identity.
/// Parameters per gate: h then s; then rho components 1..; then the free effects.
class LindbladModel {
   public:
    explicit LindbladModel(GateSet target);

    int num_params() const { return num_params_; }
    int gate_offset(size_t gate_index) const { return static_cast<int>(gate_index) * 2 * num_rates_; }
    int num_rates() const { return num_rates_; }
    const GateSet &target() const { return target_; }

    GateSet build(const RVector &x) const;
    /// Rates of each gate at x.
    std::map<std::string, ErrorGenerator> generators(const RVector &x) const;
    /// Parameters reproducing `gs` as closely as the model allows: gate errors are
    /// projected onto Hamiltonian + stochastic generators, stochastic rates are
    /// floored at `rate_floor`, and the SPAM is made trace-consistent.
    RVector encode(const GateSet &gs, double rate_floor) const;

    /// Model gates plus the derivative of vec(G) with respect to each of the
    /// gate's parameters (column-major vec, one column per parameter).
    struct Linearization {
        GateSet gateset;
        std::vector<RMatrix> gate_derivatives;
    };
    Linearization linearize(const RVector &x) const;

    /// Probabilities of one circuit and their derivatives (outcomes x params).
    void circuit_jacobian(const Linearization &lin, const std::vector<int> &circuit, RVector &p,
                          RMatrix &dp) const;

    std::vector<int> indices(const GateString &circuit) const;
    /// Parameters constrained to be non-negative (the stochastic rates).
    std::vector<bool> nonnegative() const;

   private:
    GateSet target_;
    int num_rates_ = 0;
    int num_params_ = 0;
    int spam_offset_ = 0;
};

struct EstimateOptions {
    int max_iterations = 100;
    /// Convergence: gradient norm of -log L below this ...
    double gradient_tol = 1e-6;
    /// ... or an accepted step changing log L by less than this, relative to
    /// log L_max - log L when that exceeds one.
    double loglik_tol = 1e-7;
    /// Probabilities below this enter the likelihood through a quadratic extension.
    double min_prob = 1e-4;
    double rate_floor = 0.0;
    /// Starting point in the target's gauge; replaces the LGST seed when set.
    std::optional<GateSet> initial;
};

struct GateSetEstimate {
    GateSet gateset;
    /// Linear-inversion estimate in its own gauge, and the model point seeded from it.
    GateSet lgst;
    GateSet seed;
    std::map<std::string, ErrorGenerator> generators;
    double loglik = 0.0;
    double loglik_seed = 0.0;
    /// Log-likelihood of the observed frequencies themselves.
    double loglik_max = 0.0;
    double gradient_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    std::string diagnostics;

    /// 2 (log L_max - log L).
    double deviance() const { return 2.0 * (loglik_max - loglik); }
};

/// Linear-inversion GST from the fiducial pairs around the empty germ and the
/// single gates. Throws std::invalid_argument on missing circuits or rank deficiency.
GateSet lgst(const DataSet &data, const GSTDesign &design, const GateSet &target);

double log_likelihood(const GateSet &gs, const DataSet &data, double min_prob = 1e-6);

/// LGST seed, gauge fix to the target, SPAM made physical, then maximum
/// likelihood over LindbladModel.
GateSetEstimate estimate(const DataSet &data, const GSTDesign &design, const GateSet &target,
                         const EstimateOptions &options = {});

}  // namespace donorsim::gst

#endif
