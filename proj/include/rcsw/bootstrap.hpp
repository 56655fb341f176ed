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

#ifndef RCSW_BOOTSTRAP_HPP
#define RCSW_BOOTSTRAP_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "rcsw/common.hpp"

namespace rcsw {

/// Per-shot values grouped by circuit (N_j rows of N_per shots).
struct ShotTable {
    std::vector<std::vector<double>> circuits;

    size_t total() const;
    double mean() const;
};

enum class Statistic { Mean, XebFidelity }; // XebFidelity: mean of 2^N P(x) minus one
enum class BootMethod { Aggregate, Double };

std::string method_name(BootMethod m);

struct BootCI {
    double estimate = 0.0;
    double low = 0.0;
    double high = 0.0;
    double q_minus = 0.0; // raw 15.865% quantile of the resampled statistic
    double q_plus = 0.0;  // raw 84.135% quantile
    BootMethod method = BootMethod::Aggregate;
    int r = 0;
};

/// Linear interpolation between order statistics of sorted data.
double quantile_sorted(const std::vector<double> &sorted, double p);

/// Reflected 1-sigma percentile interval [2f - q+, 2f - q-].
BootCI bootstrap_ci(const ShotTable &table, Statistic stat, BootMethod method, int r, uint64_t seed);

double p_aggregate(int k, int n_s);
double p_double(int k, int n_j, int n_per);
/// p_double for k = 0..kmax in one pass.
std::vector<double> p_double_table(int n_j, int n_per, int kmax);

enum class Observable { Xeb, Mb };

struct ExperimentModel {
    Observable observable = Observable::Xeb;
    double mu = 0.1;         // relative spread of the per-circuit error
    double eps = 3.2e-3;     // mean 2Q error
    double fidelity = 0.35;  // F at eps; fixes the gate count G = ln F / ln(1 - eps)

    double gate_count() const;
    double fidelity_at(double e) const;
};

/// One synthetic experiment: per circuit, eps_c ~ N(eps, mu eps) clipped at 0 and
/// F_c = (1 - eps_c)^G. XEB shots are 2^N P(x): Gamma(2,1) w.p. F_c, else Exp(1).
/// MB shots are Bernoulli(F_c).
ShotTable simulate_experiment(const ExperimentModel &m, int circuits, int shots, Rng &rng);

struct CoverageResult {
    double aggregate = 0.0;
    double double_ = 0.0;
    double truth = 0.0; // mean of the point estimates over all experiments
    int n_experiments = 0;
};

CoverageResult coverage(const ExperimentModel &m, int n_experiments, int circuits, int shots, int r, uint64_t seed);

} // namespace rcsw

#endif
