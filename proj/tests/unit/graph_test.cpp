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

#include "rcsw/graph.hpp"

#include <cmath>
#include <set>

#include <gtest/gtest.h>

using namespace rcsw;

namespace {

RegularGraph complete4() { return {4, 3, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}}; }

RegularGraph petersen() {
    RegularGraph g{10, 3, {}};
    for (int i = 0; i < 5; ++i) {
        g.edges.push_back({i, (i + 1) % 5});
        g.edges.push_back({i, i + 5});
        g.edges.push_back({5 + i, 5 + (i + 2) % 5});
    }
    for (auto &e : g.edges)
        if (e.first > e.second) std::swap(e.first, e.second);
    return g;
}

RegularGraph cycle(int n) {
    RegularGraph g{n, 2, {}};
    for (int i = 0; i < n; ++i) g.edges.push_back({std::min(i, (i + 1) % n), std::max(i, (i + 1) % n)});
    return g;
}

// Backtracking search for any proper k-edge-colouring.
bool exists_coloring(const RegularGraph &g, int k, size_t e, std::vector<int> &col) {
    if (e == g.edges.size()) return true;
    for (int c = 0; c < k; ++c) {
        bool ok = true;
        for (size_t f = 0; f < e && ok; ++f) {
            if (col[f] != c) continue;
            auto [a, b] = g.edges[e];
            auto [x, y] = g.edges[f];
            if (a == x || a == y || b == x || b == y) ok = false;
        }
        if (!ok) continue;
        col[e] = c;
        if (exists_coloring(g, k, e + 1, col)) return true;
    }
    col[e] = -1;
    return false;
}

} // namespace

TEST(RegularGraph, SmallSampleHasNineEdges) {
    auto g = sample_regular_graph(6, 3, 1);
    EXPECT_EQ(g.edges.size(), 9u);
    EXPECT_NO_THROW(g.validate());
}

TEST(RegularGraph, ParityAndDegreeErrors) {
    EXPECT_THROW(sample_regular_graph(5, 3, 0), ParityError);
    EXPECT_THROW(sample_regular_graph(6, 6, 0), DegreeError);
}

TEST(RegularGraph, InvariantsAcrossSizes) {
    for (auto [n, d] : std::vector<std::pair<int, int>>{{56, 12}, {32, 16}, {16, 3}, {40, 15}, {10, 9}, {12, 0}}) {
        for (uint64_t s = 0; s < 5; ++s) {
            auto g = sample_regular_graph(n, d, s);
            EXPECT_EQ(static_cast<long>(g.edges.size()), static_cast<long>(n) * d / 2);
            EXPECT_NO_THROW(g.validate()) << n << " " << d;
        }
    }
}

TEST(RegularGraph, DeterministicPerSeed) {
    EXPECT_EQ(sample_regular_graph(56, 12, 7).edges, sample_regular_graph(56, 12, 7).edges);
    EXPECT_NE(sample_regular_graph(56, 12, 7).edges, sample_regular_graph(56, 12, 8).edges);
}

TEST(EdgeColor, CompleteGraphOnFour) {
    auto cg = edge_color(complete4(), 10, 0);
    ASSERT_TRUE(cg);
    EXPECT_TRUE(cg->is_proper());
    EXPECT_EQ(cg->num_colors(), 3);
    for (const auto &cls : cg->color_classes()) EXPECT_EQ(cls.size(), 2u);
}

TEST(EdgeColor, PetersenIsRejected) {
    auto g = petersen();
    ASSERT_NO_THROW(g.validate());
    std::vector<int> col(g.edges.size(), -1);
    EXPECT_FALSE(exists_coloring(g, 3, 0, col));
    EXPECT_FALSE(edge_color(g, 50, 3).has_value());
}

TEST(EdgeColor, SixCycleAlternates) {
    auto cg = edge_color(cycle(6), 10, 0);
    ASSERT_TRUE(cg);
    EXPECT_TRUE(cg->is_proper());
    EXPECT_EQ(cg->num_colors(), 2);
}

TEST(EdgeColor, RandomGraphsClassesArePerfectMatchings) {
    for (uint64_t s = 0; s < 10; ++s) {
        auto cg = sample_colored_graph(56, 12, s);
        EXPECT_TRUE(cg.is_proper());
        EXPECT_EQ(cg.num_colors(), 12);
        for (const auto &cls : cg.color_classes()) EXPECT_EQ(cls.size(), 28u);
    }
}

TEST(Grid, SingleVertex) {
    auto gs = sample_grid(1, 3);
    EXPECT_EQ(gs.vertices.size(), 1u);
    EXPECT_TRUE(gs.edges.empty());
}

TEST(Grid, ZeroOffsetFourIsPlaquette) {
    auto gs = grid_from_transform(4, {0.0, 0.0}, 0.0);
    EXPECT_EQ(gs.edges.size(), 4u);
    int horizontal = 0;
    for (int c : gs.colors) horizontal += c < 2;
    EXPECT_EQ(horizontal, 2);
}

TEST(Grid, NearestPointsAndUnitEdges) {
    for (uint64_t s = 0; s < 20; ++s) {
        auto gs = sample_grid(56, s);
        ASSERT_EQ(gs.vertices.size(), 56u);
        EXPECT_LT(gs.edges.size(), 112u);
        double rmax = 0;
        for (auto v : gs.vertices) rmax = std::max(rmax, std::hypot(v[0], v[1]));
        // every lattice point strictly closer than the farthest chosen one must be chosen
        std::set<std::array<int, 2>> chosen(gs.lattice.begin(), gs.lattice.end());
        for (int i = -12; i <= 12; ++i)
            for (int j = -12; j <= 12; ++j) {
                double r = std::hypot(i + 0.5 + gs.offset[0], j + 0.5 + gs.offset[1]);
                if (r < rmax - 1e-9) EXPECT_TRUE(chosen.count({i, j}));
            }
        std::set<std::pair<int, int>> used;
        for (size_t e = 0; e < gs.edges.size(); ++e) {
            auto [a, b] = gs.edges[e];
            double dx = gs.vertices[a][0] - gs.vertices[b][0], dy = gs.vertices[a][1] - gs.vertices[b][1];
            EXPECT_NEAR(std::hypot(dx, dy), 1.0, 1e-12);
            EXPECT_TRUE(used.insert({a, gs.colors[e]}).second);
            EXPECT_TRUE(used.insert({b, gs.colors[e]}).second);
        }
    }
}

TEST(Expansion, KnownValues) {
    auto b = expansion_bound(56, 12);
    EXPECT_NEAR(b.eta, 2.0 * std::sqrt(std::log(2.0) / 12.0), 1e-15);
    EXPECT_NEAR(b.eta, 0.4807, 1e-4);
    EXPECT_NEAR(b.rank_lower, 3.23, 5e-3);
    EXPECT_NEAR(expansion_bound(10, 3).eta, 0.9614, 1e-3);
    EXPECT_GT(expansion_bound(10, 3).rank_lower, 0.0);
    EXPECT_GT(expansion_bound(10, 2).eta, 1.0);
    EXPECT_LE(expansion_bound(10, 2).rank_lower, 0.0);
    for (int d = 1; d < 60; ++d) {
        auto e = expansion_bound(60, d);
        EXPECT_LE(e.rank_lower, 60.0);
        EXPECT_EQ(e.rank_lower > 0, d >= 3);
    }
}

TEST(EdgeBoundary, BasicsAndComplement) {
    auto k4 = complete4();
    EXPECT_EQ(edge_boundary(k4, {0, 1, 2, 3}), 0);
    EXPECT_EQ(edge_boundary(k4, {2}), 3);
    auto g = sample_regular_graph(16, 3, 11);
    Rng rng(5);
    for (int t = 0; t < 50; ++t) {
        std::vector<int> u, c;
        for (int v = 0; v < 16; ++v) (rng() & 1 ? u : c).push_back(v);
        EXPECT_EQ(edge_boundary(g, u), edge_boundary(g, c));
    }
}

TEST(EdgeBoundary, IsoperimetricBoundOnRandomCubic) {
    auto g = sample_regular_graph(16, 3, 2);
    double lower = expansion_bound(16, 3).iso_lower;
    double best = 1e9;
    for (unsigned mask = 1; mask < (1u << 16); ++mask) {
        int size = __builtin_popcount(mask);
        if (size > 8) continue;
        std::vector<int> u;
        for (int v = 0; v < 16; ++v)
            if (mask >> v & 1) u.push_back(v);
        best = std::min(best, static_cast<double>(edge_boundary(g, u)) / size);
    }
    EXPECT_GE(best, lower);
}

TEST(Partition, TrivialCases) {
    auto g = sample_regular_graph(12, 3, 1);
    auto one = partition_blocks(g, 1, 0);
    EXPECT_EQ(cut_size(g, one), 0);
    auto all = partition_blocks(g, 12, 0);
    EXPECT_EQ(cut_size(g, all), 18);
    RegularGraph two{8, 3, {}};
    for (int off : {0, 4})
        for (int a = 0; a < 4; ++a)
            for (int b = a + 1; b < 4; ++b) two.edges.push_back({a + off, b + off});
    auto p = partition_blocks(two, 2, 0);
    EXPECT_EQ(cut_size(two, p), 0);
}

TEST(Partition, BalancedAndNoWorseThanChunks) {
    for (uint64_t s = 0; s < 5; ++s) {
        auto g = sample_regular_graph(24, 4, s);
        for (int b : {2, 3, 4, 6}) {
            auto p = partition_blocks(g, b, s);
            std::vector<int> sizes(b, 0);
            for (int x : p) ++sizes[x];
            for (int sz : sizes) EXPECT_EQ(sz, 24 / b);
            EXPECT_LE(cut_size(g, p), cut_size(g, sequential_blocks(24, b)));
        }
    }
}

TEST(GraphJson, RoundTrip) {
    auto cg = sample_colored_graph(10, 3, 4);
    auto back = graph_from_json(graph_to_json(cg));
    EXPECT_EQ(back.graph.edges, cg.graph.edges);
    EXPECT_EQ(back.colors, cg.colors);
    EXPECT_THROW(graph_from_json("{\"n\": 3,"), ParseError);
}
