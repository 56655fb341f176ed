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

#include "rcsw/tn.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "rcsw/estimators.hpp"
#include "rcsw/statevector.hpp"

using namespace rcsw;

namespace {

Circuit small_rg(int n, int d, uint64_t seed) { return build_rg_circuit(sample_colored_graph(n, d, seed), seed); }

} // namespace

TEST(Network, TensorCounts) {
    auto c = small_rg(6, 3, 1);
    EXPECT_EQ(circuit_to_tn(c, 0, 2).tensors.size(), 18u);
    EXPECT_EQ(circuit_to_tn(c, 0, 4).tensors.size(), 9u);
    for (const auto &t : circuit_to_tn(c, 0, 2).tensors) EXPECT_EQ(t.data.size(), size_t{1} << t.indices.size());
}

TEST(Network, DepthZeroIsProductOfOverlaps) {
    auto c = small_rg(5, 0, 3);
    auto sv = run(c);
    auto tn = circuit_to_tn(c, 0b10110);
    EXPECT_EQ(tn.tensors.size(), 5u);
    auto tree = optimize_order(tn, {}, OrderMethod::Greedy, 1);
    EXPECT_NEAR(std::abs(execute_tree(tn, tree) - sv.amp[0b10110]), 0.0, 1e-14);
}

TEST(Network, SingleGateTwoQubits) {
    Circuit c;
    c.n = 2;
    c.layers.push_back({Layer::Type::TwoQ, {}, {{0, 1, 0.7}}});
    auto sv = run(c);
    for (int split : {2, 4}) {
        auto tn = circuit_to_tn(c, 0, split);
        auto tree = statevector_order(tn);
        EXPECT_TRUE(is_valid_tree(tree));
        EXPECT_NEAR(std::abs(execute_tree(tn, tree) - sv.amp[0]), 0.0, 1e-15);
    }
}

TEST(Execute, MatchesStatevectorSlicedAndUnsliced) {
    for (uint64_t s = 0; s < 6; ++s) {
        auto c = small_rg(10, 4 + s % 3, s);
        auto sv = run(c);
        uint64_t x = (s * 2654435761u) & 1023;
        for (int split : {2, 4}) {
            auto tn = circuit_to_tn(c, x, split);
            for (auto m : {OrderMethod::Greedy, OrderMethod::Partition, OrderMethod::Annealed}) {
                OptimizerBudget b{4, 20};
                auto tree = optimize_order(tn, b, m, s);
                EXPECT_LT(std::abs(execute_tree(tn, tree) - sv.amp[x]), 1e-10);
                int w = std::max(2, tree.max_rank - 3);
                auto sl = slice_tree(tn, tree, w, b, m, s);
                EXPECT_LE(sl.max_rank, w);
                EXPECT_LT(std::abs(execute_tree(tn, sl) - sv.amp[x]), 1e-10);
            }
        }
    }
}

TEST(Trees, StatsAreConsistent) {
    auto c = small_rg(12, 6, 4);
    auto tn = circuit_to_tn(c, 5);
    auto tree = optimize_order(tn, {8, 50}, OrderMethod::Annealed, 2);
    auto st = tree_stats(tn, tree);
    EXPECT_NEAR(st.log2_flops, tree.log2_flops, 1e-9);
    EXPECT_EQ(st.max_rank, tree.max_rank);
    EXPECT_GE(tree.log2_flops, tree.max_rank);
    EXPECT_TRUE(is_valid_tree(tree));
    ContractionTree broken = tree;
    broken.merges.back()[0] = broken.merges.back()[1];
    EXPECT_FALSE(is_valid_tree(broken));
    EXPECT_NE(tree.to_json().find("merges"), std::string::npos);
}

TEST(Trees, SlicingMonotoneInBudget) {
    auto c = small_rg(16, 8, 6);
    auto tn = circuit_to_tn(c, 0);
    OptimizerBudget b{4, 20};
    auto tree = optimize_order(tn, b, OrderMethod::Greedy, 1);
    double prev = tree.log2_flops;
    for (int w = tree.max_rank; w >= 4; w -= 2) {
        auto sl = slice_tree(tn, tree, w, b, OrderMethod::Greedy, 1);
        EXPECT_LE(sl.max_rank, w);
        EXPECT_GE(sl.log2_flops, prev - 1e-9);
        prev = sl.log2_flops;
    }
    EXPECT_THROW(slice_tree(tn, tree, 1, b, OrderMethod::Greedy, 1), InfeasibleBudget);
    EXPECT_THROW(slice_tree(tn, tree, 3, b, OrderMethod::Greedy, 1, 0), InfeasibleBudget);
}

TEST(Trees, LightConeWithinBound) {
    for (uint64_t s = 0; s < 5; ++s) {
        for (int d : {2, 3, 5}) {
            auto c = small_rg(14, d, s);
            auto tn = circuit_to_tn(c, 0);
            auto lc = light_cone_order(tn);
            EXPECT_TRUE(is_valid_tree(lc));
            EXPECT_LE(lc.max_rank, light_cone_rank_bound(14, d) + 1e-9);
            EXPECT_LT(std::abs(execute_tree(tn, lc) - run(c).amp[0]), 1e-10);
        }
    }
}

TEST(Trees, SplitNeverCostsMore) {
    for (uint64_t s = 0; s < 3; ++s) {
        auto c = small_rg(16, 6, s);
        OptimizerBudget b{8, 50};
        auto r2 = optimize_order(circuit_to_tn(c, 0, 2), b, OrderMethod::Greedy, s);
        auto r4 = optimize_order(circuit_to_tn(c, 0, 4), b, OrderMethod::Greedy, s);
        EXPECT_LE(r2.log2_flops, r4.log2_flops + 0.5);
    }
}

TEST(Models, Bounds) {
    EXPECT_NEAR(expansion_eta(12), 2 * std::sqrt(std::log(2.0) / 12), 1e-15);
    EXPECT_NEAR(lower_bound_rank(56, 12), 56 * (1 - 2 * std::sqrt(std::log(2.0) / 12)) / 9, 1e-12);
    EXPECT_NEAR(lower_bound_rank(56, 12), 3.23, 0.01);
    EXPECT_DOUBLE_EQ(light_cone_rank_bound(10, 1), 7.0);
}

TEST(Models, SimpleCost) {
    EXPECT_DOUBLE_EQ(simple_cost(Geometry::RG, 56, 2).density, 0.0);
    EXPECT_DOUBLE_EQ(simple_cost(Geometry::RG, 56, 6).density, 0.5);
    EXPECT_DOUBLE_EQ(simple_cost(Geometry::RG, 56, 20).density, 1.0);
    auto g = simple_cost(Geometry::Grid2D, 64, 8);
    EXPECT_NEAR(g.density, 1.1 * 0.35, 1e-15);
    EXPECT_NEAR(g.log2_flops, g.n_eff + std::log2(64 * 8 / 2.0), 1e-12);
    EXPECT_NEAR(area_law_scaling(10, 64, 2) / area_law_scaling(10, 16, 2), 2.0, 1e-12);
}

TEST(Models, EffectiveQubitsFiniteAndRgAhead) {
    auto rg = max_effective_qubits(3.2e-3, 1, 100, Geometry::RG);
    auto g2 = max_effective_qubits(3.2e-3, 1, 100, Geometry::Grid2D);
    EXPECT_TRUE(std::isfinite(rg.n_eff));
    EXPECT_GT(rg.n_eff, 0);
    EXPECT_GT(rg.n_eff, g2.n_eff);
    EXPECT_LE(rg.d, std::floor(verifiable_depth(3.2e-3, 1, 100, rg.n)));
}

TEST(Models, SummaryRow) {
    auto c = small_rg(12, 6, 2);
    auto tn = circuit_to_tn(c, 0);
    OptimizerBudget b{4, 20};
    auto tree = optimize_order(tn, b, OrderMethod::Greedy, 0);
    auto sl = slice_tree(tn, tree, 4, b, OrderMethod::Greedy, 0);
    auto row = summarize_cost(c, tn, tree, sl, 4);
    EXPECT_GE(row.log2_flops_sliced, row.log2_flops - 1e-9);
    EXPECT_GE(row.density, 0.0);
    EXPECT_EQ(row.sliced_indices, static_cast<int>(sl.sliced.size()));
    EXPECT_NE(CostSummary::csv_header().find("C_density"), std::string::npos);
}
