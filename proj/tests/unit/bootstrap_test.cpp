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
#include <numeric>

#include <gtest/gtest.h>

using namespace rcsw;

namespace {

double choose(int n, int k) {
    double c = 1;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

// The labelled shot's circuit is drawn j times; each copy draws N_per shots, so
// its count is Binomial(j N_per, 1/N_per) given j.
double double_closed_form(int k, int nj, int nper) {
    double total = 0;
    for (int j = 0; j <= nj; ++j) {
        double pj = choose(nj, j) * std::pow(1.0 / nj, j) * std::pow(1 - 1.0 / nj, nj - j);
        int m = j * nper;
        if (k > m) continue;
        total += pj * choose(m, k) * std::pow(1.0 / nper, k) * std::pow(1 - 1.0 / nper, m - k);
    }
    return total;
}

ShotTable iid_table(int nj, int nper, uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> g(0.5, 1.0);
    ShotTable t;
    t.circuits.assign(nj, std::vector<double>(nper));
    for (auto &row : t.circuits)
        for (auto &v : row) v = g(rng);
    return t;
}

} // namespace

TEST(ResampleCounts, AggregateValues) {
    EXPECT_NEAR(p_aggregate(0, 1000), std::pow(1 - 1e-3, 1000), 1e-12);
    EXPECT_NEAR(p_aggregate(0, 1000), 0.3677, 1e-4);
    EXPECT_DOUBLE_EQ(p_aggregate(1, 1), 1.0);
    EXPECT_THROW(p_aggregate(3, 2), DomainError);
}

TEST(ResampleCounts, NormalisedOverSupport) {
    for (int nj : {1, 2, 7, 50})
        for (int nper : {1, 3, 20, 50}) {
            auto t = p_double_table(nj, nper, nj * nper);
            EXPECT_NEAR(std::accumulate(t.begin(), t.end(), 0.0), 1.0, 1e-9) << nj << " " << nper;
            double s = 0;
            for (int k = 0; k <= nj * nper; ++k) s += p_aggregate(k, nj * nper);
            EXPECT_NEAR(s, 1.0, 1e-9);
        }
}

TEST(ResampleCounts, ReductionCases) {
    for (int k = 0; k <= 20; ++k) EXPECT_NEAR(p_double(k, 1, 20), p_aggregate(k, 20), 1e-14);
    for (int k = 0; k <= 30; ++k) EXPECT_NEAR(p_double(k, 30, 1), p_aggregate(k, 30), 1e-14);
}

TEST(ResampleCounts, MatchesClosedForm) {
    for (auto [nj, nper] : {std::pair{10, 20}, {50, 20}, {10, 100}, {4, 5}})
        for (int k = 0; k <= 12; ++k)
            EXPECT_NEAR(p_double(k, nj, nper), double_closed_form(k, nj, nper), 1e-12) << nj << " " << nper << " " << k;
}

TEST(ResampleCounts, DoubleHasHeavierZeroAndTail) {
    EXPECT_GT(p_double(0, 50, 20), p_aggregate(0, 1000));
    EXPECT_GT(p_double(4, 50, 20), p_aggregate(4, 1000));
    EXPECT_LT(p_double(1, 50, 20), p_aggregate(1, 1000));
}

TEST(ResampleCounts, MonteCarloFrequencies) {
    const int nj = 10, nper = 20, trials = 10000;
    Rng rng(5);
    std::uniform_int_distribution<int> job(0, nj - 1), shot(0, nper - 1);
    std::vector<int> hist(nj * nper + 1, 0);
    for (int t = 0; t < trials; ++t) {
        int count = 0;
        for (int j = 0; j < nj; ++j) {
            bool ours = job(rng) == 0;
            for (int s = 0; s < nper; ++s) count += (shot(rng) == 0) && ours;
        }
        ++hist[count];
    }
    for (int k = 0; k <= 6; ++k) {
        double p = p_double(k, nj, nper);
        EXPECT_NEAR(hist[k] / double(trials), p, 3 * std::sqrt(p * (1 - p) / trials) + 1e-12) << k;
    }
}

TEST(Bootstrap, ConstantDataZeroWidth) {
    ShotTable t;
    t.circuits.assign(5, std::vector<double>(7, 0.25));
    for (auto m : {BootMethod::Aggregate, BootMethod::Double}) {
        auto ci = bootstrap_ci(t, Statistic::Mean, m, 200, 1);
        EXPECT_NEAR(ci.low, 0.25, 1e-15);
        EXPECT_NEAR(ci.high, 0.25, 1e-15);
    }
    auto x = bootstrap_ci(t, Statistic::XebFidelity, BootMethod::Aggregate, 100, 1);
    EXPECT_NEAR(x.estimate, -0.75, 1e-15);
}

TEST(Bootstrap, Errors) {
    EXPECT_THROW(bootstrap_ci(ShotTable{}, Statistic::Mean, BootMethod::Aggregate, 100, 1), EmptyTable);
    ShotTable t;
    t.circuits = {{1.0}, {}};
    EXPECT_THROW(bootstrap_ci(t, Statistic::Mean, BootMethod::Aggregate, 100, 1), EmptyTable);
    t.circuits = {{1.0, 2.0}};
    EXPECT_THROW(bootstrap_ci(t, Statistic::Mean, BootMethod::Aggregate, 50, 1), DomainError);
}

TEST(Bootstrap, ReflectionIdentity) {
    auto t = iid_table(10, 30, 3);
    for (auto m : {BootMethod::Aggregate, BootMethod::Double}) {
        auto ci = bootstrap_ci(t, Statistic::Mean, m, 500, 9);
        EXPECT_NEAR(0.5 * (ci.low + ci.high), 2 * ci.estimate - 0.5 * (ci.q_minus + ci.q_plus), 1e-14);
        EXPECT_NEAR(ci.high - ci.low, ci.q_plus - ci.q_minus, 1e-14);
        EXPECT_EQ(ci.r, 500);
    }
}

TEST(Bootstrap, SingleCircuitMethodsAgree) {
    auto t = iid_table(1, 400, 4);
    auto a = bootstrap_ci(t, Statistic::Mean, BootMethod::Aggregate, 4000, 1);
    auto d = bootstrap_ci(t, Statistic::Mean, BootMethod::Double, 4000, 2);
    EXPECT_NEAR((d.high - d.low) / (a.high - a.low), 1.0, 0.08);
}

TEST(Bootstrap, WidthScalesAsInverseRoot) {
    std::vector<double> lx, ly;
    for (int nper : {25, 100, 400, 1600}) {
        auto t = iid_table(4, nper, nper);
        auto ci = bootstrap_ci(t, Statistic::Mean, BootMethod::Aggregate, 1000, 7);
        lx.push_back(std::log(4.0 * nper));
        ly.push_back(std::log(ci.high - ci.low));
    }
    double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
    double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
    double sxy = 0, sxx = 0;
    for (size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    EXPECT_NEAR(sxy / sxx, -0.5, 0.1);
}

TEST(Bootstrap, DoubleWiderForXebModel) {
    ExperimentModel m;
    m.mu = 0.0;
    std::vector<double> ratio;
    for (uint64_t e = 0; e < 15; ++e) {
        Rng rng(e);
        auto t = simulate_experiment(m, 50, 20, rng);
        auto a = bootstrap_ci(t, Statistic::XebFidelity, BootMethod::Aggregate, 400, e);
        auto d = bootstrap_ci(t, Statistic::XebFidelity, BootMethod::Double, 400, e + 100);
        ratio.push_back((d.high - d.low) / (a.high - a.low));
    }
    std::nth_element(ratio.begin(), ratio.begin() + 7, ratio.end());
    EXPECT_GE(ratio[7], 1.0);
}

TEST(ExperimentModelTest, ShotMeansMatchFidelity) {
    ExperimentModel m;
    m.mu = 0;
    m.fidelity = 0.3;
    EXPECT_NEAR(m.fidelity_at(m.eps), 0.3, 1e-12);
    Rng rng(1);
    auto x = simulate_experiment(m, 200, 500, rng);
    EXPECT_NEAR(x.mean() - 1, 0.3, 4 * std::sqrt(1.6 / x.total()));
    m.observable = Observable::Mb;
    auto b = simulate_experiment(m, 200, 500, rng);
    EXPECT_NEAR(b.mean(), 0.3, 4 * std::sqrt(0.21 / b.total()));
}

TEST(Coverage, NoDriftMbCoversNominally) {
    ExperimentModel m;
    m.observable = Observable::Mb;
    m.mu = 0;
    auto c = coverage(m, 400, 50, 20, 300, 11);
    const double tol = 3 * std::sqrt(0.68 * 0.32 / 400);
    EXPECT_GE(c.aggregate, 0.6827 - tol);
    EXPECT_GE(c.double_, 0.6827 - tol);
    EXPECT_GE(c.double_, c.aggregate);
}
