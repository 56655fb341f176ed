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

#include "rcsw/circuit.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include <gtest/gtest.h>

#include "rcsw/statevector.hpp"

using namespace rcsw;

namespace {

constexpr double kPi = std::numbers::pi;

// Full unitary from Kronecker products; qubit q is bit q of the index.
Eigen::MatrixXcd dense_unitary(const Circuit &c) {
    const size_t dim = size_t{1} << c.n;
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
    for (const auto &l : c.layers) {
        for (const auto &g : l.one) {
            Eigen::MatrixXcd op = Eigen::MatrixXcd::Identity(1, 1);
            for (int q = c.n - 1; q >= 0; --q) {
                Eigen::MatrixXcd f = q == g.q ? Eigen::MatrixXcd(gate_matrix(g)) : Eigen::MatrixXcd::Identity(2, 2);
                Eigen::MatrixXcd k(op.rows() * 2, op.cols() * 2);
                for (int i = 0; i < op.rows(); ++i)
                    for (int j = 0; j < op.cols(); ++j) k.block(2 * i, 2 * j, 2, 2) = op(i, j) * f;
                op = k;
            }
            u = op * u;
        }
        for (const auto &g : l.two) {
            Eigen::MatrixXcd op = Eigen::MatrixXcd::Zero(dim, dim);
            for (size_t x = 0; x < dim; ++x) {
                double z = (((x >> g.q0) ^ (x >> g.q1)) & 1) ? -1.0 : 1.0;
                op(x, x) = std::exp(cplx(0, -g.theta / 2 * z));
            }
            u = op * u;
        }
    }
    return u;
}

double phase_distance(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b) {
    cplx ov = (a.adjoint() * b).trace();
    cplx ph = ov / std::abs(ov);
    return (a * ph - b).cwiseAbs().maxCoeff();
}

Circuit small_rg(int n, int d, uint64_t seed) { return build_rg_circuit(sample_colored_graph(n, d, seed), seed); }

} // namespace

TEST(Gates, DecompositionReconstructsHaarDraws) {
    Rng rng(3);
    for (int t = 0; t < 2000; ++t) {
        std::normal_distribution<double> g;
        Mat2 m;
        m << cplx(g(rng), g(rng)), cplx(g(rng), g(rng)), cplx(g(rng), g(rng)), cplx(g(rng), g(rng));
        Eigen::HouseholderQR<Mat2> qr(m);
        Mat2 u = qr.householderQ();
        Gate1Q d = decompose_1q(u, 0);
        Mat2 back = gate_matrix(d);
        EXPECT_LT(phase_distance(u, back), 1e-12);
        EXPECT_LT((back.adjoint() * back - Mat2::Identity()).norm(), 1e-12);
    }
    for (Mat2 u : {pauli_matrix(0), pauli_matrix(1), pauli_matrix(2), pauli_matrix(3)})
        EXPECT_LT(phase_distance(u, gate_matrix(decompose_1q(u, 0))), 1e-12);
}

TEST(Gates, HaarDeterministicAndFirstMoment) {
    EXPECT_EQ(haar_su2(uint64_t{42}), haar_su2(uint64_t{42}));
    Rng rng(11);
    const int draws = 100000;
    double s = 0, s2 = 0;
    for (int i = 0; i < draws; ++i) {
        double v = std::norm(gate_matrix(haar_su2(rng))(0, 0));
        s += v;
        s2 += v * v;
    }
    double mean = s / draws, se = std::sqrt((s2 / draws - mean * mean) / draws);
    EXPECT_LT(std::abs(mean - 0.5), 3 * se);
    // second moment of |<0|S|0>|^2 under Haar on SU(2) is 1/3
    EXPECT_NEAR(s2 / draws, 1.0 / 3.0, 5e-3);
}

TEST(Circuits, RgStructure) {
    auto c = small_rg(6, 3, 1);
    EXPECT_EQ(c.num_2q(), 9);
    EXPECT_EQ(c.num_1q_layers(), 4);
    for (const auto &l : c.layers) {
        if (l.type == Layer::Type::OneQ) {
            EXPECT_EQ(l.one.size(), 6u);
            continue;
        }
        std::set<int> used;
        for (const auto &g : l.two) {
            EXPECT_TRUE(used.insert(g.q0).second);
            EXPECT_TRUE(used.insert(g.q1).second);
            EXPECT_DOUBLE_EQ(g.theta, kPi / 2);
        }
        EXPECT_EQ(used.size(), 6u);
    }
    EXPECT_DOUBLE_EQ(c.d_eff(), 3.0);
    EXPECT_EQ(small_rg(56, 12, 2).num_2q(), 336);
    EXPECT_EQ(small_rg(8, 0, 2).layers.size(), 1u);
}

TEST(Circuits, DeepRgRepeatsColourClasses) {
    auto c = make_circuit(Ensemble::RG, 8, 17, 3);
    EXPECT_EQ(c.d, 17);
    EXPECT_EQ(c.num_2q_layers(), 17);
    EXPECT_EQ(c.num_2q(), 17 * 4);
    EXPECT_EQ(c.graph->graph.degree, 7);
    for (int j = 7; j < 17; ++j) EXPECT_EQ(c.layers[2 * j + 1].two, c.layers[2 * (j - 7) + 1].two);
    auto sv = run(c);
    EXPECT_NEAR(sv.norm2(), 1.0, 1e-12);
}

TEST(Circuits, GridStructure) {
    auto plaq = grid_from_transform(4, {0, 0}, 0);
    auto c4 = build_2d_circuit(plaq, 4, 1);
    EXPECT_EQ(c4.num_2q(), 4);
    auto c8 = build_2d_circuit(plaq, 8, 1);
    EXPECT_EQ(c8.num_2q(), 8);
    for (int t = 0; t < 4; ++t) EXPECT_EQ(c8.layers[2 * t + 1].two, c8.layers[2 * (t + 4) + 1].two);
    for (uint64_t s = 0; s < 5; ++s) {
        auto c = build_2d_circuit(sample_grid(56, s), 12, s);
        EXPECT_LT(c.d_eff(), 12.0);
        EXPECT_EQ(c.num_1q_layers(), 13);
    }
}

TEST(Circuits, MirrorReturnsInitialBits) {
    for (uint64_t s = 0; s < 20; ++s) {
        auto half = small_rg(8, 3, s);
        std::vector<PauliFrame> frames;
        auto m = build_mirror(half, 100 + s, &frames);
        EXPECT_EQ(frames.size(), 3u);
        EXPECT_EQ(m.num_2q_layers(), 6);
        EXPECT_EQ(m.num_1q_layers(), 7);
        auto sv = run(m);
        EXPECT_NEAR(std::norm(sv.amp[bits_to_index(*m.initial_bits)]), 1.0, 1e-10);
        for (const auto &l : m.layers)
            for (const auto &g : l.two) EXPECT_DOUBLE_EQ(g.theta, kPi / 2);
    }
}

TEST(Circuits, MirrorSeedsShareUnitaryUpToPhase) {
    auto half = small_rg(6, 3, 4);
    auto a = build_mirror(half, 1), b = build_mirror(half, 2);
    EXPECT_NE(a.layers[8].one, b.layers[8].one);
    // each mirror is exactly X^b (the bit-flip preparation) up to global phase
    for (const auto *m : {&a, &b}) {
        auto u = dense_unitary(*m);
        auto xb = bits_to_index(*m->initial_bits);
        Eigen::MatrixXcd flip = Eigen::MatrixXcd::Zero(u.rows(), u.cols());
        for (Eigen::Index x = 0; x < u.rows(); ++x) flip(x ^ xb, x) = 1.0;
        EXPECT_LT(phase_distance(flip, u), 1e-10);
    }
}

TEST(Circuits, MirrorOfGridCircuit) {
    auto half = build_2d_circuit(sample_grid(10, 3), 4, 3);
    auto m = build_mirror(half, 9);
    auto sv = run(m);
    EXPECT_NEAR(std::norm(sv.amp[bits_to_index(*m.initial_bits)]), 1.0, 1e-10);
}

TEST(Circuits, TransportRbIdentity) {
    for (int d : {0, 1, 3, 6}) {
        auto c = small_rg(8, d, 7);
        std::vector<int> bits{1, 0, 1, 1, 0, 0, 1, 0};
        auto t = build_transport_rb(c, bits, 3);
        EXPECT_EQ(t.num_2q(), c.num_2q());
        EXPECT_EQ(t.layers.size(), c.layers.size());
        for (const auto &l : t.layers)
            for (const auto &g : l.two) EXPECT_EQ(g.theta, 0.0);
        auto sv = run(t);
        EXPECT_NEAR(std::norm(sv.amp[bits_to_index(bits)]), 1.0, 1e-10);
    }
}

TEST(Serialization, JsonRoundTrip) {
    auto c = small_rg(10, 3, 5);
    auto back = circuit_from_json(to_json(c));
    EXPECT_EQ(back.n, c.n);
    EXPECT_EQ(back.layers, c.layers);
    EXPECT_EQ(back.graph->graph.edges, c.graph->graph.edges);
    auto m = build_mirror(c, 3);
    auto mb = circuit_from_json(to_json(m));
    EXPECT_EQ(mb.layers, m.layers);
    EXPECT_EQ(mb.initial_bits, m.initial_bits);
    EXPECT_EQ(to_json(mb), to_json(m));
}

TEST(Serialization, EmptyCircuitIsValid) {
    Circuit c;
    c.n = 3;
    auto back = circuit_from_json(to_json(c));
    EXPECT_TRUE(back.layers.empty());
    EXPECT_EQ(back.n, 3);
}

TEST(Serialization, ParseErrorsCarryLocation) {
    try {
        circuit_from_json("{\"n\": 2, ");
        FAIL();
    } catch (const ParseError &e) {
        EXPECT_NE(e.where().find("byte"), std::string::npos);
    }
    try {
        circuit_from_json(R"({"n":2,"d":1,"ensemble":"rg","seed":0,"layers":[{"type":"2q","gates":[{"q0":0,"q1":5,"theta":1}]}]})");
        FAIL();
    } catch (const ParseError &e) {
        EXPECT_EQ(e.where(), "/layers/0/gates/0/q1");
    }
    EXPECT_THROW(circuit_from_json(R"({"n":2,"d":1,"ensemble":"xx","seed":0,"layers":[]})"), ParseError);
}

TEST(Serialization, QasmResimulationMatches) {
    for (uint64_t s = 0; s < 5; ++s) {
        auto c = small_rg(8, 4, s);
        auto a = run(c), b = simulate_qasm(export_qasm(c));
        cplx ov = 0;
        for (size_t x = 0; x < a.amp.size(); ++x) ov += std::conj(b.amp[x]) * a.amp[x];
        cplx ph = ov / std::abs(ov);
        double err = 0;
        for (size_t x = 0; x < a.amp.size(); ++x) err = std::max(err, std::abs(a.amp[x] - ph * b.amp[x]));
        EXPECT_LT(err, 1e-10);
    }
}

TEST(Statevector, MatchesDenseUnitary) {
    for (uint64_t s = 0; s < 5; ++s) {
        auto c = small_rg(6, 3, s);
        auto sv = run(c);
        Eigen::VectorXcd ref = dense_unitary(c).col(0);
        for (size_t x = 0; x < sv.amp.size(); ++x) EXPECT_LT(std::abs(sv.amp[x] - ref(x)), 1e-12);
        EXPECT_NEAR(sv.norm2(), 1.0, 1e-12);
    }
}
