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

#include "rcsw/bootstrap.hpp"

#include <algorithm>
#include <cmath>

namespace rcsw {

size_t ShotTable::total() const {
    size_t t = 0;
    for (const auto &c : circuits) t += c.size();
    return t;
}

double ShotTable::mean() const {
    double s = 0;
    for (const auto &c : circuits)
        for (double v : c) s += v;
    return s / total();
}

std::string method_name(BootMethod m) { return m == BootMethod::Aggregate ? "aggregate" : "double"; }

double quantile_sorted(const std::vector<double> &sorted, double p) {
    if (sorted.empty()) throw EmptySamples("quantile of empty data");
    double h = (sorted.size() - 1) * p;
    size_t lo = static_cast<size_t>(std::floor(h));
    size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - lo) * (sorted[hi] - sorted[lo]);
}

namespace {

constexpr double kQMinus = 0.15865525393145707;
constexpr double kQPlus = 0.8413447460685429;

inline size_t pick(Rng &rng, size_t n) {
    return static_cast<size_t>((static_cast<unsigned __int128>(rng()) * n) >> 64);
}

double log_binom_pmf(int k, int n, double p) {
    if (k < 0 || k > n) return -INFINITY;
    if (p >= 1.0) return k == n ? 0.0 : -INFINITY;
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * std::log(p) +
           (n - k) * std::log1p(-p);
}

} // namespace

BootCI bootstrap_ci(const ShotTable &table, Statistic stat, BootMethod method, int r, uint64_t seed) {
    if (table.circuits.empty()) throw EmptyTable("no circuits");
    for (const auto &c : table.circuits) {
        if (c.empty()) throw EmptyTable("circuit with no shots");
        for (double v : c)
            if (!std::isfinite(v)) throw DomainError("non-finite shot value");
    }
    if (r < 100) throw DomainError("need at least 100 resamples");
    const double shift = stat == Statistic::XebFidelity ? -1.0 : 0.0;
    Rng rng(seed);
    std::vector<double> stats(r);
    if (method == BootMethod::Aggregate) {
        std::vector<double> pool;
        pool.reserve(table.total());
        for (const auto &c : table.circuits) pool.insert(pool.end(), c.begin(), c.end());
        const size_t n = pool.size();
        for (int b = 0; b < r; ++b) {
            double s = 0;
            for (size_t i = 0; i < n; ++i) s += pool[pick(rng, n)];
            stats[b] = s / n + shift;
        }
    } else {
        const size_t nj = table.circuits.size();
        for (int b = 0; b < r; ++b) {
            double s = 0;
            size_t count = 0;
            for (size_t j = 0; j < nj; ++j) {
                const auto &row = table.circuits[pick(rng, nj)];
                for (size_t i = 0; i < row.size(); ++i) s += row[pick(rng, row.size())];
                count += row.size();
            }
            stats[b] = s / count + shift;
        }
    }
    std::sort(stats.begin(), stats.end());
    BootCI ci;
    ci.method = method;
    ci.r = r;
    ci.estimate = table.mean() + shift;
    ci.q_minus = quantile_sorted(stats, kQMinus);
    ci.q_plus = quantile_sorted(stats, kQPlus);
    ci.low = 2 * ci.estimate - ci.q_plus;
    ci.high = 2 * ci.estimate - ci.q_minus;
    return ci;
}

double p_aggregate(int k, int n_s) {
    if (n_s < 1 || k < 0 || k > n_s) throw DomainError("need 0 <= k <= N_s");
    return std::exp(log_binom_pmf(k, n_s, 1.0 / n_s));
}

std::vector<double> p_double_table(int n_j, int n_per, int kmax) {
    if (n_j < 1 || n_per < 1 || kmax < 0) throw DomainError("need N_j, N_per >= 1 and k >= 0");
    kmax = std::min(kmax, n_j * n_per);
    // appearances within one resampled job
    std::vector<double> bin(std::min(kmax, n_per) + 1);
    for (size_t m = 0; m < bin.size(); ++m) bin[m] = std::exp(log_binom_pmf(static_cast<int>(m), n_per, 1.0 / n_per));
    // conv[k] = P(k | j) for the current j, built as the j-fold convolution of `bin`
    std::vector<double> conv(kmax + 1, 0.0), next(kmax + 1), out(kmax + 1, 0.0);
    conv[0] = 1.0;
    for (int j = 0; j <= n_j; ++j) {
        double w = std::exp(log_binom_pmf(j, n_j, 1.0 / n_j));
        for (int k = 0; k <= kmax; ++k) out[k] += w * conv[k];
        if (j == n_j) break;
        std::fill(next.begin(), next.end(), 0.0);
        for (int k = 0; k <= kmax; ++k) {
            if (conv[k] == 0.0) continue;
            for (size_t m = 0; m < bin.size() && k + static_cast<int>(m) <= kmax; ++m) next[k + m] += conv[k] * bin[m];
        }
        conv.swap(next);
    }
    return out;
}

double p_double(int k, int n_j, int n_per) {
    if (k < 0 || k > n_j * n_per) throw DomainError("need 0 <= k <= N_j N_per");
    return p_double_table(n_j, n_per, k)[k];
}

double ExperimentModel::gate_count() const { return std::log(fidelity) / std::log1p(-eps); }

double ExperimentModel::fidelity_at(double e) const { return std::pow(1.0 - std::clamp(e, 0.0, 1.0), gate_count()); }

ShotTable simulate_experiment(const ExperimentModel &m, int circuits, int shots, Rng &rng) {
    if (m.mu < 0 || !(m.fidelity > 0) || m.fidelity > 1) throw DomainError("invalid experiment model");
    std::normal_distribution<double> gauss(m.eps, m.mu * m.eps);
    std::uniform_real_distribution<double> uni;
    std::gamma_distribution<double> porter(2.0, 1.0);
    std::exponential_distribution<double> flat(1.0);
    ShotTable t;
    t.circuits.resize(circuits);
    for (auto &row : t.circuits) {
        double f = m.fidelity_at(m.mu > 0 ? gauss(rng) : m.eps);
        row.resize(shots);
        for (auto &v : row) {
            bool ideal = uni(rng) < f;
            if (m.observable == Observable::Mb)
                v = ideal ? 1.0 : 0.0;
            else
                v = ideal ? porter(rng) : flat(rng);
        }
    }
    return t;
}

CoverageResult coverage(const ExperimentModel &m, int n_experiments, int circuits, int shots, int r, uint64_t seed) {
    if (n_experiments < 1 || circuits < 1 || shots < 1) throw DomainError("sizes must be positive");
    const Statistic stat = m.observable == Observable::Xeb ? Statistic::XebFidelity : Statistic::Mean;
    std::vector<BootCI> agg(n_experiments), dbl(n_experiments);
    parallel_for(n_experiments, [&](size_t e) {
        Rng rng(derive_seed(seed, 3 * e));
        auto table = simulate_experiment(m, circuits, shots, rng);
        agg[e] = bootstrap_ci(table, stat, BootMethod::Aggregate, r, derive_seed(seed, 3 * e + 1));
        dbl[e] = bootstrap_ci(table, stat, BootMethod::Double, r, derive_seed(seed, 3 * e + 2));
    });
    CoverageResult out;
    out.n_experiments = n_experiments;
    for (const auto &c : agg) out.truth += c.estimate;
    out.truth /= n_experiments;
    for (int e = 0; e < n_experiments; ++e) {
        out.aggregate += agg[e].low <= out.truth && out.truth <= agg[e].high;
        out.double_ += dbl[e].low <= out.truth && out.truth <= dbl[e].high;
    }
    out.aggregate /= n_experiments;
    out.double_ /= n_experiments;
    return out;
}

} // namespace rcsw
