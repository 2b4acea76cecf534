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

#include "donorsim/fitting.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

namespace donorsim {

namespace {

struct ResidualFunctor {
    using Scalar = double;
    using InputType = Eigen::VectorXd;
    using ValueType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

    const std::function<void(const RVector &, RVector &)> *fn;
    int n_in;
    int n_out;

    int inputs() const { return n_in; }
    int values() const { return n_out; }
    int operator()(const InputType &x, ValueType &r) const {
        (*fn)(x, r);
        return 0;
    }
};

/// Linear least squares for a, b, c in a cos(w t) + b sin(w t) + c.
Eigen::Vector3d fit_sinusoid(const std::vector<double> &t, const std::vector<double> &y, double w) {
    Eigen::MatrixXd a(t.size(), 3);
    Eigen::VectorXd b(t.size());
    for (size_t k = 0; k < t.size(); ++k) {
        a(k, 0) = std::cos(w * t[k]);
        a(k, 1) = std::sin(w * t[k]);
        a(k, 2) = 1.0;
        b(k) = y[k];
    }
    return a.colPivHouseholderQr().solve(b);
}

}  // namespace

LeastSquaresResult least_squares(const std::function<void(const RVector &, RVector &)> &residuals,
                                 const RVector &x0, int num_residuals, int max_evaluations) {
    ResidualFunctor f{&residuals, static_cast<int>(x0.size()), num_residuals};
    Eigen::NumericalDiff<ResidualFunctor> nd(f);
    Eigen::LevenbergMarquardt<Eigen::NumericalDiff<ResidualFunctor>> lm(nd);
    lm.parameters.maxfev = max_evaluations;
    lm.parameters.xtol = 1e-12;
    lm.parameters.ftol = 1e-14;
    RVector x = x0;
    auto status = lm.minimize(x);
    RVector r(num_residuals);
    residuals(x, r);
    LeastSquaresResult out;
    out.params = x;
    out.residual_norm = r.norm();
    out.iterations = static_cast<int>(lm.iter);
    using S = Eigen::LevenbergMarquardtSpace::Status;
    out.converged = x.allFinite() && (status == S::RelativeErrorTooSmall || status == S::RelativeReductionTooSmall ||
                                      status == S::RelativeErrorAndReductionTooSmall ||
                                      status == S::CosinusTooSmall || status == S::XtolTooSmall ||
                                      status == S::FtolTooSmall || status == S::GtolTooSmall);
    return out;
}

double dominant_frequency(const std::vector<double> &t, const std::vector<double> &y) {
    if (t.size() < 3) {
        return 0.0;
    }
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    const double span = t.back() - t.front();
    double dt_min = std::numeric_limits<double>::infinity();
    for (size_t k = 1; k < t.size(); ++k) {
        dt_min = std::min(dt_min, t[k] - t[k - 1]);
    }
    if (!(span > 0.0) || !(dt_min > 0.0)) {
        return 0.0;
    }
    const double f_max = 0.5 / dt_min;
    const double df = 0.25 / span;
    double best_f = 0.0, best_power = -1.0;
    for (double f = df; f <= f_max; f += df) {
        double re = 0.0, im = 0.0;
        for (size_t k = 0; k < t.size(); ++k) {
            re += (y[k] - mean) * std::cos(kTwoPi * f * t[k]);
            im += (y[k] - mean) * std::sin(kTwoPi * f * t[k]);
        }
        double power = re * re + im * im;
        if (power > best_power) {
            best_power = power;
            best_f = f;
        }
    }
    return best_f;
}

namespace {

DecayFit fit_decay(const std::vector<double> &t, const std::vector<double> &y, bool free_exponent,
                   double fixed_frequency) {
    if (t.size() != y.size() || t.size() < 6) {
        throw std::invalid_argument("decay fit needs at least 6 matching points");
    }
    const bool fix_f = fixed_frequency >= 0.0;
    const double f0 = fix_f ? fixed_frequency : dominant_frequency(t, y);
    const double span = t.back() - t.front();

    // Seed amplitude/phase/offset from a linear fit on the early half.
    std::vector<double> th(t.begin(), t.begin() + t.size() / 2), yh(y.begin(), y.begin() + y.size() / 2);
    Eigen::Vector3d s = fit_sinusoid(th, yh, kTwoPi * f0);
    const double a0 = std::hypot(s(0), s(1));
    const double phi0 = std::atan2(-s(1), s(0));

    // Parameters: amplitude, decay rate (1/T), phase, offset, [frequency], [exponent].
    // The decay rate enters squared so T stays positive and may run to infinity.
    std::vector<double> best;
    double best_norm = std::numeric_limits<double>::infinity();
    DecayFit out;
    for (double rate_guess : {1.0 / span, 2.0 / span, 0.5 / span, 4.0 / span}) {
        RVector x0(4 + (fix_f ? 0 : 1) + (free_exponent ? 1 : 0));
        x0(0) = a0 > 0 ? a0 : 0.5;
        x0(1) = std::sqrt(rate_guess);
        x0(2) = phi0;
        x0(3) = s(2);
        int idx = 4;
        if (!fix_f) x0(idx++) = f0;
        if (free_exponent) x0(idx++) = std::log(1.0 / 6.0);  // n = 1
        auto unpack = [&](const RVector &x, double &a, double &rate, double &ph, double &c, double &f, double &n) {
            a = x(0);
            rate = x(1) * x(1);
            ph = x(2);
            c = x(3);
            int i = 4;
            f = fix_f ? fixed_frequency : x(i++);
            n = free_exponent ? 0.5 + 3.5 / (1.0 + std::exp(-x(i++))) : 2.0;
        };
        std::function<void(const RVector &, RVector &)> res = [&](const RVector &x, RVector &r) {
            double a, rate, ph, c, f, n;
            unpack(x, a, rate, ph, c, f, n);
            for (size_t k = 0; k < t.size(); ++k) {
                double env = std::exp(-std::pow(std::abs(t[k]) * rate, n));
                r(k) = a * env * std::cos(kTwoPi * f * t[k] + ph) + c - y[k];
            }
        };
        LeastSquaresResult r = least_squares(res, x0, static_cast<int>(t.size()));
        if (r.residual_norm < best_norm && r.params.allFinite()) {
            best_norm = r.residual_norm;
            double a, rate, ph, c, f, n;
            unpack(r.params, a, rate, ph, c, f, n);
            if (a < 0) {
                a = -a;
                ph += kPi;
            }
            ph = std::remainder(ph, kTwoPi);
            out.amplitude = a;
            out.offset = c;
            out.phase = ph;
            out.frequency = f;
            out.exponent = n;
            out.converged = r.converged;
            // Decay time and its standard error from the local curvature in the rate direction.
            RVector r0(t.size()), r1(t.size());
            res(r.params, r0);
            RVector xp = r.params;
            const double h = std::max(1e-6, std::abs(r.params(1)) * 1e-4);
            xp(1) += h;
            res(xp, r1);
            RVector jcol = (r1 - r0) / h;
            const double dof = std::max<double>(1.0, static_cast<double>(t.size()) - static_cast<double>(x0.size()));
            const double sigma2 = r0.squaredNorm() / dof;
            const double var_sqrt_rate = jcol.squaredNorm() > 0 ? sigma2 / jcol.squaredNorm() : 0.0;
            const double sr = r.params(1);
            const double rate_se = 2.0 * std::abs(sr) * std::sqrt(var_sqrt_rate);
            // Unresolved when the rate is consistent with zero or the envelope drops by
            // less than 1e-4 over the sampled window.
            const double drop = -std::expm1(-std::pow(rate * span, n));
            if (rate <= 0.0 || rate <= 2.0 * rate_se || drop < 1e-4) {
                out.decay_unresolved = true;
                out.decay_time = std::numeric_limits<double>::infinity();
                out.decay_time_stderr = std::numeric_limits<double>::infinity();
            } else {
                out.decay_unresolved = false;
                out.decay_time = 1.0 / rate;
                out.decay_time_stderr = rate_se / (rate * rate);
            }
        }
    }
    return out;
}

}  // namespace

DecayFit fit_gaussian_decay(const std::vector<double> &t, const std::vector<double> &y, double fixed_frequency) {
    return fit_decay(t, y, false, fixed_frequency);
}

DecayFit fit_stretched_decay(const std::vector<double> &t, const std::vector<double> &y, double fixed_frequency) {
    return fit_decay(t, y, true, fixed_frequency);
}

}  // namespace donorsim
