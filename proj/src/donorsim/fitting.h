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

#ifndef DONORSIM_FITTING_H
#define DONORSIM_FITTING_H

#include <functional>
#include <vector>

#include "donorsim/linalg.h"

namespace donorsim {

struct LeastSquaresResult {
    RVector params;
    double residual_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Levenberg-Marquardt with forward-difference Jacobian. `residuals(x, r)` fills r
/// (length num_residuals).
LeastSquaresResult least_squares(const std::function<void(const RVector &, RVector &)> &residuals,
                                 const RVector &x0, int num_residuals, int max_evaluations = 4000);

/// Fitted decaying oscillation a * exp(-(t/T)^n) * cos(2 pi f t + phi) + c.
struct DecayFit {
    double amplitude = 0.0;
    double decay_time = 0.0;  // same units as t; infinite when no decay is resolved
    double exponent = 2.0;
    double frequency = 0.0;
    double phase = 0.0;
    double offset = 0.0;
    double decay_time_stderr = 0.0;
    /// True when the fitted decay rate is compatible with zero (decay_time is a bound).
    bool decay_unresolved = false;
    bool converged = false;
};

/// Gaussian-envelope fit with n = 2 fixed (Ramsey). With `fixed_frequency` >= 0
/// the oscillation frequency is held at that value.
DecayFit fit_gaussian_decay(const std::vector<double> &t, const std::vector<double> &y,
                            double fixed_frequency = -1.0);
/// Stretched-exponential fit with free exponent (Hahn echo). With `fixed_frequency`
/// >= 0 the oscillation frequency is held at that value.
DecayFit fit_stretched_decay(const std::vector<double> &t, const std::vector<double> &y,
                             double fixed_frequency = -1.0);

/// Frequency of the largest periodogram peak of y(t) (mean removed).
double dominant_frequency(const std::vector<double> &t, const std::vector<double> &y);

}  // namespace donorsim

#endif
