// Copyright 2026 The RCSW Authors
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

#include "rcsw/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <Eigen/Dense>
#include <unsupported/Eigen/NonLinearOptimization>

#include "json.hpp"

namespace rcsw {

XebResult xeb(const std::vector<uint64_t> &samples, const std::vector<double> &probs, int n) {
    if (samples.empty()) throw EmptySamples("xeb needs at least one sample");
    if (probs.size() != (size_t{1} << n)) throw DomainError("probability table must have 2^n entries");
    XebResult r;
    r.m = samples.size();
    const double dim = std::ldexp(1.0, n);
    double sum = 0;
    r.rescaled.reserve(samples.size());
    for (auto x : samples) {
        double v = dim * probs.at(x);
        r.rescaled.push_back(v);
        sum += v;
    }
    r.value = sum / samples.size() - 1.0;
    return r;
}

double mb_return_probability(const std::vector<uint64_t> &samples, uint64_t target) {
    if (samples.empty()) throw EmptySamples("no samples");
    size_t hits = 0;
    for (auto x : samples) hits += x == target;
    return static_cast<double>(hits) / samples.size();
}

double LogisticParams::operator()(double n) const { return A / (1.0 + std::exp(-k * (n - N0))); }

double GateCountParams::eps_mem_at(int n) const { return memory ? (*memory)(n) : eps_mem; }

double effective_2q_infidelity(const GateCountParams &p, int n) {
    if (p.scale_by_56_over_n) return 56.0 / n * (1.25 * p.eps_2q + 3.0 * p.eps_mem_at(56));
    return 1.25 * p.eps_2q + 3.0 * p.eps_mem_at(n);
}

double gate_counting(const GateCountParams &p, int n, double d, GcMode mode) {
    double delta = mode == GcMode::Comparison ? p.delta : 0.0;
    double eps = effective_2q_infidelity(p, n);
    double expo = std::max(0.0, n * (d - delta) / 2.0);
    return std::pow(1.0 - eps, expo) * std::pow(1.0 - p.p_spam, n);
}

double fit_depth_shift(const GateCountParams &p, int n, const std::vector<double> &depths,
                       const std::vector<double> &fidelities) {
    if (depths.empty() || depths.size() != fidelities.size()) throw FitError("need matching nonempty inputs");
    double slope = n / 2.0 * std::log(1.0 - effective_2q_infidelity(p, n));
    double spam = n * std::log(1.0 - p.p_spam);
    double acc = 0;
    for (size_t i = 0; i < depths.size(); ++i) {
        if (!(fidelities[i] > 0)) throw FitError("fidelities must be positive");
        acc += depths[i] - (std::log(fidelities[i]) - spam) / slope;
    }
    return acc / depths.size();
}

double rb_asymptote(RbKind kind) { return kind == RbKind::OneQubit ? 0.5 : 0.25; }

double rb_infidelity(RbKind kind, double lambda) {
    if (kind == RbKind::OneQubit) return (1.0 - lambda) / 2.0;
    return 0.75 * (1.0 - std::pow(lambda, 2.0 / 3.0));
}

double rb_lambda_from_infidelity(RbKind kind, double eps) {
    if (kind == RbKind::OneQubit) return 1.0 - 2.0 * eps;
    return std::pow(1.0 - 4.0 * eps / 3.0, 1.5);
}

namespace {

// Residual sum of squares with the amplitude profiled out.
double profile_sse(const std::vector<double> &m, const std::vector<double> &y, double lambda, double &amp) {
    double sw2 = 0, swy = 0;
    for (size_t i = 0; i < m.size(); ++i) {
        double w = std::pow(lambda, m[i]);
        sw2 += w * w;
        swy += w * y[i];
    }
    amp = sw2 > 0 ? swy / sw2 : 0.0;
    double sse = 0;
    for (size_t i = 0; i < m.size(); ++i) {
        double r = y[i] - amp * std::pow(lambda, m[i]);
        sse += r * r;
    }
    return sse;
}

} // namespace

DecayFit fit_decay(const std::vector<double> &lengths, const std::vector<double> &survival, RbKind kind) {
    if (lengths.size() != survival.size()) throw FitError("lengths and survival differ in size");
    if (lengths.size() < 3) throw FitError("need at least three sequence lengths");
    if (std::set<double>(lengths.begin(), lengths.end()).size() < 2) throw FitError("need distinct lengths");
    const double b = rb_asymptote(kind);
    std::vector<double> y(survival.size());
    double ymax = 0;
    for (size_t i = 0; i < y.size(); ++i) {
        if (!std::isfinite(survival[i]) || !std::isfinite(lengths[i])) throw FitError("non-finite data");
        y[i] = survival[i] - b;
        ymax = std::max(ymax, std::abs(y[i]));
    }
    if (ymax < 1e-12) throw FitError("data sit on the asymptote; decay rate is unidentifiable");
    double mmax = *std::max_element(lengths.begin(), lengths.end());
    // lambda = exp(-u) with u on a log grid, then golden-section refinement
    auto sse_u = [&](double u) {
        double a;
        return profile_sse(lengths, y, std::exp(-u), a);
    };
    double umax = 50.0 / std::max(1.0, mmax);
    double best_u = 0.0, best = sse_u(0.0);
    const int grid = 400;
    for (int i = 0; i <= grid; ++i) {
        double u = umax * std::pow(1e-9, 1.0 - static_cast<double>(i) / grid);
        double s = sse_u(u);
        if (s < best) {
            best = s;
            best_u = u;
        }
    }
    double lo = best_u / 1.2, hi = best_u * 1.2 + 1e-12;
    if (best_u == 0.0) hi = umax * 1e-9;
    const double g = (std::sqrt(5.0) - 1) / 2;
    double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
    double fc = sse_u(c), fd = sse_u(d);
    for (int it = 0; it < 200 && hi - lo > 1e-16; ++it) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = sse_u(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = sse_u(d);
        }
    }
    double u = 0.5 * (lo + hi);
    if (sse_u(u) > best) u = best_u;
    if (sse_u(0.0) <= sse_u(u)) u = 0.0;
    DecayFit f;
    f.lambda = std::exp(-u);
    f.sse = profile_sse(lengths, y, f.lambda, f.A);
    f.asymptote = b;
    f.infidelity = rb_infidelity(kind, f.lambda);
    if (!std::isfinite(f.A) || !std::isfinite(f.lambda)) throw FitError("fit diverged");
    return f;
}

namespace {

struct LogisticFunctor {
    using Scalar = double;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
    using InputType = Eigen::VectorXd;
    using ValueType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;

    const std::vector<double> &x, &y;
    int inputs() const { return 3; }
    int values() const { return static_cast<int>(x.size()); }

    int operator()(const Eigen::VectorXd &p, Eigen::VectorXd &f) const {
        for (size_t i = 0; i < x.size(); ++i) f(i) = p(0) / (1.0 + std::exp(-p(2) * (x[i] - p(1)))) - y[i];
        return 0;
    }
    int df(const Eigen::VectorXd &p, Eigen::MatrixXd &j) const {
        for (size_t i = 0; i < x.size(); ++i) {
            double e = std::exp(-p(2) * (x[i] - p(1)));
            double s = 1.0 / (1.0 + e);
            double ds = s * s * e; // derivative of s with respect to k (x - N0)
            j(i, 0) = s;
            j(i, 1) = -p(0) * ds * p(2);
            j(i, 2) = p(0) * ds * (x[i] - p(1));
        }
        return 0;
    }
};

} // namespace

LogisticFit fit_logistic(const std::vector<double> &n, const std::vector<double> &eps) {
    if (n.size() != eps.size()) throw FitError("inputs differ in size");
    if (n.size() < 3) throw FitError("need at least three points");
    double ymax = 0, ymin = std::numeric_limits<double>::infinity();
    for (double v : eps) {
        if (!std::isfinite(v)) throw FitError("non-finite data");
        ymax = std::max(ymax, std::abs(v));
        ymin = std::min(ymin, v);
    }
    LogisticFit out;
    if (ymax == 0.0 || ymax - ymin <= 1e-12 * ymax) {
        double mean = 0;
        for (double v : eps) mean += v;
        mean /= eps.size();
        out.params = {2.0 * mean, n[n.size() / 2], 0.0};
        out.degenerate = true;
        return out;
    }
    std::vector<double> ys(eps.size());
    for (size_t i = 0; i < ys.size(); ++i) ys[i] = eps[i] / ymax;
    double nlo = *std::min_element(n.begin(), n.end()), nhi = *std::max_element(n.begin(), n.end());
    double span = std::max(1e-9, nhi - nlo);
    LogisticFunctor fn{n, ys};
    double best = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_p(3);
    for (double a0 : {1.0, 1.5}) {
        for (double frac : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            for (double kk : {1.0, 4.0, 10.0, 25.0}) {
                Eigen::VectorXd p(3);
                p << a0, nlo + frac * span, kk / span;
                Eigen::LevenbergMarquardt<LogisticFunctor> lm(fn);
                lm.parameters.maxfev = 2000;
                lm.parameters.xtol = 1e-14;
                lm.parameters.ftol = 1e-14;
                lm.minimize(p);
                Eigen::VectorXd f(n.size());
                fn(p, f);
                double s = f.squaredNorm();
                if (std::isfinite(s) && p.allFinite() && s < best) {
                    best = s;
                    best_p = p;
                }
            }
        }
    }
    if (!std::isfinite(best)) throw FitError("logistic fit failed");
    out.params = {best_p(0) * ymax, best_p(1), best_p(2)};
    out.sse = best * ymax * ymax;
    out.degenerate = std::abs(best_p(2)) * span < 1e-6;
    return out;
}

double verifiable_depth(double eps, double tau, double t_budget, int n) {
    if (!(tau > 0)) throw DomainError("tau must be positive");
    if (t_budget < tau) throw DomainError("time budget must be at least tau");
    if (!(eps > 0) || n <= 0) throw DomainError("eps and N must be positive");
    return std::log(t_budget / tau) / (eps * n);
}

std::string FidelityReport::to_json() const {
    nlohmann::json j;
    j["estimator"] = estimator;
    j["value"] = value;
    j["ci_low"] = ci_low;
    j["ci_high"] = ci_high;
    j["n_samples"] = n_samples;
    j["params"] = nlohmann::json::object();
    for (const auto &[k, v] : params) j["params"][k] = v;
    return j.dump();
}

} // namespace rcsw
