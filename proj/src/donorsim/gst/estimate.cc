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

#include "donorsim/gst/estimate.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "donorsim/gst/gauge.h"

namespace donorsim::gst {

LindbladModel::LindbladModel(GateSet target) : target_(std::move(target)) {
    target_.validate();
    const int n = target_.ptm_dim();
    num_rates_ = n - 1;
    spam_offset_ = static_cast<int>(target_.labels.size()) * 2 * num_rates_;
    num_params_ = spam_offset_ + (n - 1) + (target_.num_outcomes() - 1) * n;
}

std::vector<bool> LindbladModel::nonnegative() const {
    std::vector<bool> out(num_params_, false);
    for (size_t g = 0; g < target_.labels.size(); ++g) {
        for (int p = 0; p < num_rates_; ++p) out[gate_offset(g) + num_rates_ + p] = true;
    }
    return out;
}

std::vector<int> LindbladModel::indices(const GateString &circuit) const {
    std::vector<int> out;
    out.reserve(circuit.size());
    for (const auto &l : circuit) {
        auto it = std::find(target_.labels.begin(), target_.labels.end(), l);
        if (it == target_.labels.end()) {
            throw std::invalid_argument("circuit uses unknown gate '" + l + "'");
        }
        out.push_back(static_cast<int>(it - target_.labels.begin()));
    }
    return out;
}

namespace {

ErrorGenerator rates_at(const RVector &x, int offset, int nr) {
    return ErrorGenerator{x.segment(offset, nr), x.segment(offset + nr, nr)};
}

RVector unit_effect(int n) {
    RVector u = RVector::Zero(n);
    u(0) = std::sqrt(std::sqrt(static_cast<double>(n)));
    return u;
}

}  // namespace

GateSet LindbladModel::build(const RVector &x) const {
    if (x.size() != num_params_) {
        throw std::invalid_argument("parameter vector has the wrong size");
    }
    const int n = target_.ptm_dim();
    const int nq = target_.num_qubits;
    GateSet gs = target_;
    gs.unitaries.clear();
    for (size_t g = 0; g < target_.labels.size(); ++g) {
        const auto &l = target_.labels[g];
        gs.gates[l] = real_exp(generator_matrix(rates_at(x, gate_offset(g), num_rates_), nq)) * target_.gate(l);
    }
    gs.rho = RVector::Zero(n);
    gs.rho(0) = 1.0 / std::sqrt(std::sqrt(static_cast<double>(n)));
    gs.rho.tail(n - 1) = x.segment(spam_offset_, n - 1);
    RVector last = unit_effect(n);
    const int m = target_.num_outcomes();
    for (int k = 0; k < m - 1; ++k) {
        gs.effects[k] = x.segment(spam_offset_ + n - 1 + k * n, n);
        last -= gs.effects[k];
    }
    gs.effects[m - 1] = last;
    return gs;
}

std::map<std::string, ErrorGenerator> LindbladModel::generators(const RVector &x) const {
    std::map<std::string, ErrorGenerator> out;
    for (size_t g = 0; g < target_.labels.size(); ++g) {
        out[target_.labels[g]] = rates_at(x, gate_offset(g), num_rates_);
    }
    return out;
}

RVector LindbladModel::encode(const GateSet &gs, double rate_floor) const {
    const int n = target_.ptm_dim();
    const int nq = target_.num_qubits;
    RVector x = RVector::Zero(num_params_);
    for (size_t g = 0; g < target_.labels.size(); ++g) {
        const auto &l = target_.labels[g];
        ErrorGenerator eg = ErrorGenerator::zero(nq);
        try {
            eg = project_generator(error_generator(gs.gate(l), target_.gate(l)), nq);
        } catch (const std::domain_error &) {
        }
        x.segment(gate_offset(g), num_rates_) = eg.h;
        x.segment(gate_offset(g) + num_rates_, num_rates_) = eg.s.cwiseMax(rate_floor);
    }
    x.segment(spam_offset_, n - 1) = gs.rho.tail(n - 1);
    const int m = target_.num_outcomes();
    for (int k = 0; k < m - 1; ++k) {
        x.segment(spam_offset_ + n - 1 + k * n, n) = gs.effects[k];
    }
    return x;
}

LindbladModel::Linearization LindbladModel::linearize(const RVector &x) const {
    const int nq = target_.num_qubits;
    Linearization lin;
    lin.gateset = build(x);
    for (size_t g = 0; g < target_.labels.size(); ++g) {
        const auto &l = target_.labels[g];
        const RMatrix &gt = target_.gate(l);
        const int off = gate_offset(g);
        RMatrix gen = generator_matrix(rates_at(x, off, num_rates_), nq);
        const int n2 = static_cast<int>(gt.size());
        RMatrix d(n2, 2 * num_rates_);
        for (int p = 0; p < num_rates_; ++p) {
            RMatrix dh = exp_frechet(gen, hamiltonian_generator(nq, p + 1)) * gt;
            RMatrix ds = exp_frechet(gen, stochastic_generator(nq, p + 1)) * gt;
            d.col(p) = Eigen::Map<const RVector>(dh.data(), n2);
            d.col(num_rates_ + p) = Eigen::Map<const RVector>(ds.data(), n2);
        }
        lin.gate_derivatives.push_back(std::move(d));
    }
    return lin;
}

void LindbladModel::circuit_jacobian(const Linearization &lin, const std::vector<int> &circuit, RVector &p,
                                     RMatrix &dp) const {
    const GateSet &gs = lin.gateset;
    const int n = gs.ptm_dim();
    const int m = gs.num_outcomes();
    const size_t len = circuit.size();
    std::vector<const RMatrix *> gates;
    for (const auto &l : gs.labels) gates.push_back(&gs.gates.at(l));

    std::vector<RVector> v(len + 1);
    v[0] = gs.rho;
    for (size_t i = 0; i < len; ++i) v[i + 1] = *gates[circuit[i]] * v[i];

    RMatrix left(m, n);
    for (int k = 0; k < m; ++k) left.row(k) = gs.effects[k].transpose();
    p = left * v[len];

    dp.setZero(m, num_params_);
    std::vector<RMatrix> w(gates.size());
    for (size_t i = len; i-- > 0;) {
        const int g = circuit[i];
        if (w[g].size() == 0) w[g] = RMatrix::Zero(m, n * n);
        for (int b = 0; b < n; ++b) {
            w[g].middleCols(b * n, n) += v[i](b) * left;
        }
        left = left * *gates[g];
    }
    for (size_t g = 0; g < w.size(); ++g) {
        if (w[g].size()) dp.middleCols(gate_offset(g), 2 * num_rates_) = w[g] * lin.gate_derivatives[g];
    }
    dp.middleCols(spam_offset_, n - 1) = left.rightCols(n - 1);
    const int eoff = spam_offset_ + n - 1;
    for (int k = 0; k < m - 1; ++k) {
        dp.block(k, eoff + k * n, 1, n) = v[len].transpose();
        dp.block(m - 1, eoff + k * n, 1, n) = -v[len].transpose();
    }
}

namespace {

std::unordered_map<std::string, int> circuit_index(const DataSet &data) {
    std::unordered_map<std::string, int> out;
    for (size_t k = 0; k < data.circuits.size(); ++k) out[circuit_str(data.circuits[k])] = static_cast<int>(k);
    return out;
}

RVector frequencies(const DataSet &data, int index) {
    const double total = static_cast<double>(data.total(index));
    RVector f(data.num_outcomes);
    for (int k = 0; k < data.num_outcomes; ++k) f(k) = data.counts[index][k] / total;
    return f;
}

/// Per-outcome deviance term t(p) = N (f log(f / p) - f + p) and its first two
/// derivatives, extended quadratically below min_prob.
struct Term {
    double t, d1, d2;
};

Term deviance_term(double n, double f, double p, double min_prob) {
    auto exact = [&](double q) {
        Term r;
        r.t = n * ((f > 0.0 ? f * std::log(f / q) : 0.0) - f + q);
        r.d1 = n * (1.0 - f / q);
        r.d2 = n * f / (q * q);
        return r;
    };
    if (p >= min_prob) return exact(p);
    Term at = exact(min_prob);
    const double dx = p - min_prob;
    const double curv = at.d2 + n / min_prob;
    return {at.t + at.d1 * dx + 0.5 * curv * dx * dx, at.d1 + curv * dx, curv};
}

/// Residual r and dr/dp with r^2 + floor = 2 t. Below min_prob the residual is
/// linear in p so the Gauss-Newton curvature is exact there.
struct Residual {
    double r, drdp, floor;
};

Residual residual(double n, double f, double p, double min_prob) {
    Term t = deviance_term(n, f, p, min_prob);
    if (p < min_prob) {
        const double sc = std::sqrt(t.d2);
        const double r = t.d1 / sc;
        return {r, sc, 2.0 * t.t - r * r};
    }
    const double r = std::sqrt(2.0 * std::max(t.t, 0.0));
    if (r < 1e-10 * std::sqrt(n)) {
        return {0.0, std::sqrt(std::max(t.d2, 0.0)), 0.0};
    }
    const double s = t.d1 >= 0.0 ? 1.0 : -1.0;
    return {s * r, std::abs(t.d1) / r, 0.0};
}

struct Problem {
    const LindbladModel &model;
    std::vector<std::vector<int>> circuits;
    std::vector<RVector> freqs;
    std::vector<double> totals;
    double min_prob;

    double objective(const RVector &x) const {
        GateSet gs = model.build(x);
        double f = 0.0;
        for (size_t c = 0; c < circuits.size(); ++c) {
            RVector v = gs.rho;
            for (int g : circuits[c]) v = gs.gates.at(gs.labels[g]) * v;
            for (int k = 0; k < gs.num_outcomes(); ++k) {
                const Residual r = residual(totals[c], freqs[c](k), gs.effects[k].dot(v), min_prob);
                f += r.r * r.r + r.floor;
            }
        }
        return f;
    }

    double normal_equations(const RVector &x, RMatrix &jtj, RVector &jtr) const {
        const int np = model.num_params();
        auto lin = model.linearize(x);
        const int m = lin.gateset.num_outcomes();
        jtj.setZero(np, np);
        jtr.setZero(np);
        const int chunk = 256;
        RMatrix jc(chunk * m, np);
        RVector rc(chunk * m);
        RVector p;
        RMatrix dp;
        double f = 0.0;
        int rows = 0;
        auto flush = [&]() {
            if (!rows) return;
            jtj.selfadjointView<Eigen::Lower>().rankUpdate(jc.topRows(rows).transpose());
            jtr.noalias() += jc.topRows(rows).transpose() * rc.head(rows);
            rows = 0;
        };
        for (size_t c = 0; c < circuits.size(); ++c) {
            model.circuit_jacobian(lin, circuits[c], p, dp);
            for (int k = 0; k < m; ++k) {
                const Residual r = residual(totals[c], freqs[c](k), p(k), min_prob);
                rc(rows) = r.r;
                jc.row(rows) = r.drdp * dp.row(k);
                f += r.r * r.r + r.floor;
                ++rows;
            }
            if (rows + m > chunk * m) flush();
        }
        flush();
        jtj = jtj.selfadjointView<Eigen::Lower>();
        return f;
    }
};

struct Optimum {
    RVector x;
    RVector gradient;
    int iterations = 0;
    bool converged = false;
};

constexpr double kNullEigenvalue = 1e-4;

/// Damped Gauss-Newton step from x with the stochastic rates kept non-negative.
/// Rates that would cross zero are moved onto the bound and the remaining
/// parameters re-solved with them fixed. The solve uses the Marquardt-scaled
/// normal matrix in its eigenbasis and drops near-null (gauge-like) directions,
/// along which the data carry no information.
RVector bounded_step(const RVector &x, const RMatrix &jtj, const RVector &jtr, double lambda,
                     const std::vector<bool> &bounded) {
    const int np = static_cast<int>(x.size());
    std::vector<bool> pinned(np, false);
    for (int i = 0; i < np; ++i) pinned[i] = bounded[i] && x(i) <= 0.0 && jtr(i) > 0.0;
    RVector trial = x;
    for (int pass = 0; pass < np; ++pass) {
        RVector delta = RVector::Zero(np);
        std::vector<int> free;
        for (int i = 0; i < np; ++i) {
            if (pinned[i]) {
                delta(i) = -x(i);
            } else {
                free.push_back(i);
            }
        }
        const int nf = static_cast<int>(free.size());
        const RVector rhs = -(jtr + jtj * delta);
        RVector scale(nf);
        for (int j = 0; j < nf; ++j) {
            const double d = jtj(free[j], free[j]);
            scale(j) = d > 0.0 ? 1.0 / std::sqrt(d) : 0.0;
        }
        RMatrix a(nf, nf);
        RVector b(nf);
        for (int j = 0; j < nf; ++j) {
            b(j) = scale(j) * rhs(free[j]);
            for (int i = 0; i < nf; ++i) a(i, j) = scale(i) * jtj(free[i], free[j]) * scale(j);
        }
        Eigen::SelfAdjointEigenSolver<RMatrix> es(a);
        RVector coeff = es.eigenvectors().transpose() * b;
        for (int k = 0; k < nf; ++k) {
            const double e = es.eigenvalues()(k);
            coeff(k) = e > kNullEigenvalue ? coeff(k) / (e + lambda) : 0.0;
        }
        const RVector step = scale.cwiseProduct(es.eigenvectors() * coeff);
        bool crossed = false;
        for (int j = 0; j < nf; ++j) {
            const int i = free[j];
            delta(i) = step(j);
            if (bounded[i] && x(i) + delta(i) < 0.0) {
                pinned[i] = true;
                crossed = true;
            }
        }
        trial = x + delta;
        if (!crossed) break;
    }
    for (int i = 0; i < np; ++i)
        if (bounded[i]) trial(i) = std::max(trial(i), 0.0);
    return trial;
}

/// Gradient with the components pushing pinned rates below zero removed.
RVector projected_gradient(const RVector &x, const RVector &jtr, const std::vector<bool> &bounded) {
    RVector g = jtr;
    for (int i = 0; i < x.size(); ++i)
        if (bounded[i] && x(i) <= 0.0 && jtr(i) > 0.0) g(i) = 0.0;
    return g;
}

/// Levenberg-Marquardt on the signed deviance residuals.
Optimum optimize(const Problem &prob, RVector x, const EstimateOptions &options, double loglik_tol,
                 std::ostringstream &diag) {
    const std::vector<bool> bounded = prob.model.nonnegative();
    RMatrix jtj;
    RVector jtr;
    double f = prob.normal_equations(x, jtj, jtr);
    double lambda = 1e-3;
    Optimum out;
    int it = 0;
    for (; it < options.max_iterations; ++it) {
        // The objective is 2 (-log L) + const, so the gradient of -log L is J^T r.
        if (projected_gradient(x, jtr, bounded).norm() < options.gradient_tol) {
            out.converged = true;
            diag << "gradient norm below tolerance";
            break;
        }
        const RVector trial = bounded_step(x, jtj, jtr, lambda, bounded);
        const double ft = prob.objective(trial);
        if (std::isfinite(ft) && ft < f) {
            const double change = 0.5 * (f - ft);
            x = trial;
            f = prob.normal_equations(x, jtj, jtr);
            lambda = std::max(lambda / 3.0, 1e-12);
            if (change < loglik_tol * std::max(1.0, 0.5 * f) && lambda < 10.0) {
                out.converged = true;
                diag << "log-likelihood change below tolerance";
                ++it;
                break;
            }
        } else {
            lambda *= 4.0;
            if (lambda > 1e16) {
                diag << "step rejected at maximal damping";
                break;
            }
        }
    }
    if (!out.converged && diag.str().empty()) diag << "iteration limit reached";
    out.x = x;
    out.gradient = projected_gradient(x, jtr, bounded);
    out.iterations = it;
    return out;
}

/// Nearest unit-trace PSD preparation and a PSD POVM renormalized to sum to one.
void physical_spam(GateSet &gs) {
    const int dim = gs.dim();
    CMatrix rho = ptm_to_state(gs.rho);
    rho /= rho.trace().real();
    gs.rho = state_to_ptm(nearest_physical(rho));
    std::vector<CMatrix> e;
    CMatrix total = CMatrix::Zero(dim, dim);
    for (const auto &v : gs.effects) {
        CMatrix x = ptm_to_state(v);
        Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (x + x.adjoint()));
        RVector lam = es.eigenvalues().cwiseMax(0.0);
        e.push_back(es.eigenvectors() * lam.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint());
        total += e.back();
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(total);
    const RVector lam = es.eigenvalues().cwiseMax(1e-12).cwiseInverse().cwiseSqrt();
    const CMatrix w = es.eigenvectors() * lam.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
    for (size_t k = 0; k < e.size(); ++k) {
        gs.effects[k] = state_to_ptm(w * e[k] * w);
    }
}

}  // namespace

double log_likelihood(const GateSet &gs, const DataSet &data, double min_prob) {
    double ll = 0.0;
    for (size_t c = 0; c < data.circuits.size(); ++c) {
        RVector p = gs.probabilities(data.circuits[c]);
        for (int k = 0; k < data.num_outcomes; ++k) {
            if (data.counts[c][k] > 0) ll += data.counts[c][k] * std::log(std::max(p(k), min_prob));
        }
    }
    return ll;
}

GateSet lgst(const DataSet &data, const GSTDesign &design, const GateSet &target) {
    target.validate();
    const auto index = circuit_index(data);
    const int m = target.num_outcomes();
    const int np = static_cast<int>(design.prep_fiducials.size());
    const int nm = static_cast<int>(design.meas_fiducials.size());
    const int n = target.ptm_dim();
    auto freq = [&](const GateString &c) {
        auto it = index.find(circuit_str(c));
        if (it == index.end()) {
            throw std::invalid_argument("LGST needs circuit " + circuit_str(c));
        }
        return frequencies(data, it->second);
    };
    auto sandwich = [&](const GateString &body) {
        RMatrix out(nm * m, np);
        for (int i = 0; i < np; ++i) {
            for (int j = 0; j < nm; ++j) {
                out.block(j * m, i, m, 1) = freq(concat(concat(design.prep_fiducials[i], body), design.meas_fiducials[j]));
            }
        }
        return out;
    };
    int empty_prep = -1, empty_meas = -1;
    for (int i = 0; i < np; ++i)
        if (design.prep_fiducials[i].empty()) empty_prep = i;
    for (int j = 0; j < nm; ++j)
        if (design.meas_fiducials[j].empty()) empty_meas = j;
    if (empty_prep < 0 || empty_meas < 0) {
        throw std::invalid_argument("LGST needs the empty fiducial in both fiducial sets");
    }
    RMatrix gram = sandwich({});
    Eigen::JacobiSVD<RMatrix> svd(gram, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RVector s = svd.singularValues();
    if (s.size() < n || s(n - 1) < 1e-6 * s(0)) {
        throw std::invalid_argument("LGST fiducial Gram matrix is rank deficient");
    }
    const RMatrix ur = svd.matrixU().leftCols(n);
    const RMatrix vr = svd.matrixV().leftCols(n);
    const RVector sinv = s.head(n).cwiseInverse();

    GateSet out = target;
    out.unitaries.clear();
    for (const auto &l : target.labels) {
        out.gates[l] = sinv.asDiagonal() * (ur.transpose() * sandwich({l}) * vr);
    }
    out.rho = sinv.asDiagonal() * (ur.transpose() * gram.col(empty_prep));
    for (int k = 0; k < m; ++k) {
        out.effects[k] = (gram.row(empty_meas * m + k) * vr).transpose();
    }
    return out;
}

GateSetEstimate estimate(const DataSet &data, const GSTDesign &design, const GateSet &target,
                         const EstimateOptions &options) {
    if (data.num_outcomes != target.num_outcomes()) {
        throw std::invalid_argument("dataset and target disagree on the number of outcomes");
    }
    GateSetEstimate est;
    est.lgst = lgst(data, design, target);

    GaugeOptions gopt;
    gopt.group = GaugeGroup::Full;
    GateSet fixed = options.initial ? *options.initial : gauge_optimize(est.lgst, target, gopt).gateset;
    const int n = target.ptm_dim();
    for (auto &[l, g] : fixed.gates) {
        g.row(0) = RVector::Unit(n, 0).transpose();
    }
    physical_spam(fixed);

    LindbladModel model(target);
    RVector x = model.encode(fixed, options.rate_floor);
    est.seed = model.build(x);

    const auto index = circuit_index(data);
    for (size_t c = 0; c < data.circuits.size(); ++c) {
        for (int k = 0; k < data.num_outcomes; ++k) {
            const double nk = static_cast<double>(data.counts[c][k]);
            if (nk > 0) est.loglik_max += nk * std::log(nk / data.total(c));
        }
    }
    // Fit circuits of increasing germ length, each stage seeded by the last; the
    // final stage uses every circuit in the dataset.
    std::vector<size_t> ends = design.stage_ends;
    if (ends.empty() || ends.back() != design.circuits.size()) ends.push_back(design.circuits.size());
    std::ostringstream diag;
    int total_iterations = 0;
    RVector grad;
    size_t fitted = 0;
    size_t nonempty = 0;
    for (size_t c = 0; c < data.circuits.size(); ++c) nonempty += data.total(c) > 0;
    for (size_t stage = 0; stage <= ends.size(); ++stage) {
        const bool last = stage == ends.size();
        Problem prob{model, {}, {}, {}, options.min_prob};
        auto add = [&](int c) {
            if (data.total(c) == 0) return;
            prob.circuits.push_back(model.indices(data.circuits[c]));
            prob.freqs.push_back(frequencies(data, c));
            prob.totals.push_back(static_cast<double>(data.total(c)));
        };
        if (last) {
            for (size_t c = 0; c < data.circuits.size(); ++c) add(static_cast<int>(c));
        } else {
            for (size_t c = 0; c < ends[stage]; ++c) {
                auto it = index.find(circuit_str(design.circuits[c]));
                if (it != index.end()) add(it->second);
            }
        }
        if (prob.circuits.empty() || prob.circuits.size() == fitted) continue;
        fitted = prob.circuits.size();
        diag.str("");
        est.converged = false;
        Optimum opt = optimize(prob, x, options, prob.circuits.size() == nonempty ? options.loglik_tol : 1e3 * options.loglik_tol, diag);
        x = opt.x;
        est.converged = opt.converged;
        total_iterations += opt.iterations;
        grad = opt.gradient;
    }
    est.iterations = total_iterations;
    est.gradient_norm = grad.norm();
    est.diagnostics = diag.str();
    est.gateset = model.build(x);
    est.generators = model.generators(x);
    est.loglik = log_likelihood(est.gateset, data, options.min_prob);
    est.loglik_seed = log_likelihood(est.seed, data, options.min_prob);
    return est;
}

}  // namespace donorsim::gst
