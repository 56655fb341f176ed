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

#ifndef RCSW_ESTIMATORS_HPP
#define RCSW_ESTIMATORS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rcsw/common.hpp"

namespace rcsw {

struct XebResult {
    double value = 0.0;
    size_t m = 0;
    std::vector<double> rescaled; // 2^N P(x_j)
};

/// Linear cross-entropy of samples against the ideal distribution `probs` (length 2^n).
XebResult xeb(const std::vector<uint64_t> &samples, const std::vector<double> &probs, int n);

double mb_return_probability(const std::vector<uint64_t> &samples, uint64_t target);

struct LogisticParams {
    double A = 4.1e-4;
    double N0 = 20.0;
    double k = 0.18;
    double operator()(double n) const;
};

/// Component error rates (average infidelities) feeding the gate-counting model.
struct GateCountParams {
    double eps_1q = 0.29e-4;
    double eps_2q = 1.57e-3;
    double eps_mem = 4.0e-4; // used when `memory` is unset
    double p_spam = 1.47e-3;
    double delta = 1.12;     // depth shift applied in comparison mode
    std::optional<LogisticParams> memory;
    /// Hold the per-layer error fixed at the 56-qubit value: eps(N) = 56/N * eps(56).
    bool scale_by_56_over_n = false;

    double eps_mem_at(int n) const;
};

double effective_2q_infidelity(const GateCountParams &p, int n);

enum class GcMode { Raw, Comparison };

/// (1 - eps(N))^{N(d - delta)/2} (1 - p_spam)^N with delta = 0 in Raw mode.
double gate_counting(const GateCountParams &p, int n, double d, GcMode mode = GcMode::Raw);

/// Least-squares depth shift matching gate counting to measured fidelities.
double fit_depth_shift(const GateCountParams &p, int n, const std::vector<double> &depths,
                       const std::vector<double> &fidelities);

enum class RbKind { OneQubit, TwoQubit };

struct DecayFit {
    double A = 0.0;
    double lambda = 1.0;
    double asymptote = 0.5;
    double infidelity = 0.0;
    double sse = 0.0;
};

double rb_asymptote(RbKind kind);
double rb_infidelity(RbKind kind, double lambda);
double rb_lambda_from_infidelity(RbKind kind, double eps);

/// Fits p(m) = A lambda^m + asymptote (asymptote fixed by `kind`).
DecayFit fit_decay(const std::vector<double> &lengths, const std::vector<double> &survival, RbKind kind);

struct LogisticFit {
    LogisticParams params;
    double sse = 0.0;
    bool degenerate = false;
};

LogisticFit fit_logistic(const std::vector<double> &n, const std::vector<double> &eps_mem);

/// ln(T/tau) / (eps N); callers floor the result.
double verifiable_depth(double eps, double tau, double t_budget, int n);

struct FidelityReport {
    std::string estimator;
    double value = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    size_t n_samples = 0;
    std::map<std::string, double> params;

    std::string to_json() const;
};

} // namespace rcsw

#endif
