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

#include "rcsw/statevector.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

using namespace rcsw;

namespace {

constexpr double kPi = std::numbers::pi;

Circuit small_rg(int n, int d, uint64_t seed) { return build_rg_circuit(sample_colored_graph(n, d, seed), seed); }

Eigen::MatrixXcd embed_1q(int n, int q, const Mat2 &m) {
    const size_t dim = size_t{1} << n;
    Eigen::MatrixXcd op = Eigen::MatrixXcd::Zero(dim, dim);
    for (size_t x = 0; x < dim; ++x) {
        int b = x >> q & 1;
        size_t x0 = x & ~(size_t{1} << q);
        op(x0, x) += m(0, b);
        op(x0 | (size_t{1} << q), x) += m(1, b);
    }
    return op;
}

Eigen::MatrixXcd embed_uzz(int n, int a, int b, double theta) {
    const size_t dim = size_t{1} << n;
    Eigen::MatrixXcd op = Eigen::MatrixXcd::Zero(dim, dim);
    for (size_t x = 0; x < dim; ++x) op(x, x) = std::exp(cplx(0, ((x >> a ^ x >> b) & 1) ? theta / 2 : -theta / 2));
    return op;
}

// Exact density-matrix evolution with the same noise placement as the trajectory simulator.
Eigen::MatrixXcd density_evolve(const Circuit &c, double p2, double phi) {
    const int n = c.n;
    const size_t dim = size_t{1} << n;
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    rho(0, 0) = 1.0;
    for (const auto &l : c.layers) {
        for (const auto &g : l.one) {
            auto u = embed_1q(n, g.q, gate_matrix(g));
            rho = u * rho * u.adjoint();
        }
        if (l.type != Layer::Type::TwoQ) continue;
        for (const auto &g : l.two) {
            auto u = embed_uzz(n, g.q0, g.q1, g.theta);
            rho = u * rho * u.adjoint();
            Eigen::MatrixXcd acc = (1 - p2) * rho;
            for (int k = 1; k < 16; ++k) {
                Eigen::MatrixXcd p = embed_1q(n, g.q0, pauli_matrix(k / 4)) * embed_1q(n, g.q1, pauli_matrix(k % 4));
                acc += (p2 / 15) * p * rho * p.adjoint();
            }
            rho = acc;
        }
        for (int q = 0; q < n; ++q) {
            auto u = embed_1q(n, q, rz_matrix(phi));
            rho = u * rho * u.adjoint();
        }
    }
    return rho;
}

} // namespace

TEST(Statevector, EmptyAndSingleGate) {
    Circuit c;
    c.n = 3;
    auto sv = run(c);
    EXPECT_EQ(sv.amp[0], cplx(1.0));
    Circuit x;
    x.n = 1;
    x.layers.push_back({Layer::Type::OneQ, {{0, 0.0, kPi, 0.0}}, {}});
    EXPECT_NEAR(std::abs(run(x).amp[1]), 1.0, 1e-15);
}

TEST(Statevector, CapacityError) {
    Circuit c;
    c.n = 27;
    EXPECT_THROW(run(c), CapacityError);
    c.n = 10;
    EXPECT_THROW(run(c, 8), CapacityError);
}

TEST(Statevector, UzzHasSchmidtRankTwo) {
    // operator Schmidt decomposition: reshape U_{(a b),(a' b')} to M_{(a a'),(b b')}
    Mat4 u = uzz_matrix(kPi / 2);
    Eigen::Matrix4cd m;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            for (int ap = 0; ap < 2; ++ap)
                for (int bp = 0; bp < 2; ++bp) m(2 * a + ap, 2 * b + bp) = u(2 * a + b, 2 * ap + bp);
    Eigen::JacobiSVD<Eigen::Matrix4cd> svd(m);
    int rank = 0;
    for (int i = 0; i < 4; ++i) rank += svd.singularValues()(i) > 1e-12;
    EXPECT_EQ(rank, 2);
}

TEST(Statevector, NormPreservedEveryLayer) {
    auto c = small_rg(10, 5, 3);
    auto sv = StateVector::zero(10);
    for (const auto &l : c.layers) {
        apply_layer(sv, l);
        EXPECT_NEAR(sv.norm2(), 1.0, 1e-10);
    }
}

TEST(Sampling, UniformAndPointMass) {
    StateVector sv = StateVector::zero(3);
    for (auto &a : sv.amp) a = 1.0 / std::sqrt(8.0);
    auto s = sample(sv, 80000, 1);
    std::vector<int> counts(8, 0);
    for (auto x : s) ++counts[x];
    for (int c : counts) EXPECT_NEAR(c, 10000, 5 * std::sqrt(10000 * 7.0 / 8.0));
    auto pm = sample(StateVector::basis({1, 0, 1}), 100, 2);
    for (auto x : pm) EXPECT_EQ(x, 5u);
    EXPECT_EQ(sample(sv, 10, 7), sample(sv, 10, 7));
    EXPECT_EQ(bitstring(5, 3), "101");
}

TEST(PorterThomas, UniformIsZeroAndDeepCircuitsConverge) {
    StateVector sv = StateVector::zero(4);
    for (auto &a : sv.amp) a = 0.25;
    EXPECT_NEAR(porter_thomas_stats(sv).second_moment, 0.0, 1e-14);
    std::vector<double> stat;
    for (uint64_t s = 0; s < 10; ++s) stat.push_back(porter_thomas_stats(run(small_rg(12, 10, s))).second_moment);
    std::sort(stat.begin(), stat.end());
    EXPECT_NEAR(stat[5], 1.0, 0.1);
    auto hist = porter_thomas_stats(run(small_rg(14, 10, 1)));
    // density close to exp(-p) in the bulk
    for (int b = 0; b < 10; ++b) {
        double mid = 0.5 * (hist.bin_edges[b] + hist.bin_edges[b + 1]);
        EXPECT_NEAR(hist.density[b], std::exp(-mid), 0.1);
    }
}

TEST(PorterThomas, MedianStatisticApproachesOneWithDepth) {
    std::vector<double> med;
    for (int d : {1, 2, 4, 8}) {
        std::vector<double> v;
        for (uint64_t s = 0; s < 9; ++s) v.push_back(porter_thomas_stats(run(small_rg(10, d, 50 + s))).second_moment);
        std::sort(v.begin(), v.end());
        med.push_back(std::abs(v[4] - 1.0));
    }
    EXPECT_GT(med.front(), med.back());
    EXPECT_LT(med.back(), 0.15);
}

TEST(Purity, ProductBellAndDeep) {
    auto prod = StateVector::basis({1, 0, 1, 1});
    EXPECT_NEAR(bipartite_purity(prod, {0, 1}), 1.0, 1e-14);
    StateVector bell = StateVector::zero(2);
    bell.amp[0] = bell.amp[3] = 1 / std::sqrt(2.0);
    EXPECT_NEAR(bipartite_purity(bell, {0}), 0.5, 1e-14);
    EXPECT_NEAR(bipartite_purity(bell, {1}), 0.5, 1e-14);
    auto deep = run(small_rg(12, 11, 5));
    double p = bipartite_purity(deep, {0, 1, 2, 3, 4, 5});
    // Haar value for 6|6 split is (2*64)/(4096+1)
    EXPECT_NEAR(p, 128.0 / 4097.0, 0.01);
    EXPECT_THROW(bipartite_purity(deep, {}), DomainError);
}

TEST(Noise, AngleAndFactory) {
    NoiseModel nm = NoiseModel::from_infidelities(1.57e-3, 4e-4);
    EXPECT_NEAR(nm.eps_2q, 1.9625e-3, 1e-15);
    double phi = nm.mem_angle(56);
    EXPECT_NEAR(2.0 / 3.0 * std::pow(std::sin(phi / 2), 2), 4e-4, 1e-15);
    nm.scale_by_56_over_n = true;
    EXPECT_DOUBLE_EQ(nm.scale(28), 2.0);
}

TEST(Trajectories, NoiselessIsExactlyOne) {
    auto c = small_rg(8, 4, 2);
    auto r = run_trajectories(c, NoiseModel(), 4, 1);
    for (double f : r.per_traj_fidelity) EXPECT_NEAR(f, 1.0, 1e-12);
}

TEST(Trajectories, MatchDensityMatrixOracle) {
    auto c = small_rg(4, 3, 9);
    NoiseModel nm;
    nm.eps_2q = 0.05;
    nm.eps_mem = 0.01;
    auto rho = density_evolve(c, nm.eps_2q, nm.mem_angle(4));
    auto psi = run(c);
    Eigen::Map<Eigen::VectorXcd> v(psi.amp.data(), psi.amp.size());
    double exact = (v.adjoint() * rho * v)(0, 0).real();
    auto r = run_trajectories(c, nm, 4000, 5);
    EXPECT_NEAR(r.fidelity, exact, 4 * r.fidelity_se + 1e-12);
    // XEB per trajectory averages to 2^N sum diag(rho) P - 1
    double xe = 0;
    for (size_t x = 0; x < psi.amp.size(); ++x) xe += rho(x, x).real() * std::norm(psi.amp[x]);
    double sexb = 0, m = r.xeb_mean;
    for (double x : r.per_traj_xeb) sexb += (x - m) * (x - m);
    sexb = std::sqrt(sexb / (r.per_traj_xeb.size() - 1) / r.per_traj_xeb.size());
    EXPECT_NEAR(r.xeb_mean, 16 * xe - 1, 4 * sexb + 1e-12);
}

TEST(Trajectories, CoherentDephasingIsDeterministic) {
    auto c = small_rg(6, 2, 4);
    NoiseModel nm;
    nm.eps_mem = 0.02;
    auto rho = density_evolve(c, 0.0, nm.mem_angle(6));
    auto psi = run(c);
    Eigen::Map<Eigen::VectorXcd> v(psi.amp.data(), psi.amp.size());
    double exact = (v.adjoint() * rho * v)(0, 0).real();
    auto r = run_trajectories(c, nm, 3, 5);
    for (double f : r.per_traj_fidelity) EXPECT_NEAR(f, exact, 1e-12);
}

TEST(Trajectories, FidelityDecreasesWithNoise) {
    auto c = small_rg(8, 6, 1);
    double prev = 1.0;
    for (double eps : {0.01, 0.03, 0.06}) {
        NoiseModel nm;
        nm.eps_2q = eps;
        auto r = run_trajectories(c, nm, 400, 3);
        EXPECT_LT(r.fidelity, prev + 2 * r.fidelity_se);
        prev = r.fidelity;
    }
}

TEST(Trajectories, ReadoutNoiseIsStochastic) {
    std::vector<double> p{0.5, 0.25, 0.125, 0.125};
    auto q = apply_readout_noise(p, 2, 0.1);
    double s = 0;
    for (double x : q) s += x;
    EXPECT_NEAR(s, 1.0, 1e-15);
    EXPECT_NEAR(q[0], 0.81 * 0.5 + 0.09 * 0.25 + 0.09 * 0.125 + 0.01 * 0.125, 1e-15);
}
