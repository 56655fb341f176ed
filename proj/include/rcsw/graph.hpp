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

#ifndef RCSW_GRAPH_HPP
#define RCSW_GRAPH_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rcsw/common.hpp"

namespace rcsw {

using Edge = std::pair<int, int>;

/// Simple d-regular graph. Edges are stored with first < second.
struct RegularGraph {
    int n = 0;
    int degree = 0;
    std::vector<Edge> edges;

    std::vector<std::vector<int>> adjacency() const;
    /// Throws Error if any invariant (degree, simplicity, edge count) fails.
    void validate() const;
};

struct ColoredGraph {
    RegularGraph graph;
    std::vector<int> colors; // aligned with graph.edges

    int num_colors() const;
    std::vector<std::vector<Edge>> color_classes() const;
    bool is_proper() const;
};

struct GridSample {
    int n = 0;
    std::array<double, 2> offset{0.0, 0.0};
    double rotation = 0.0;
    std::vector<std::array<int, 2>> lattice; // integer lattice coordinates
    std::vector<std::array<double, 2>> vertices;
    std::vector<Edge> edges;
    std::vector<int> colors; // direction class in [0, 4)
};

struct ExpansionBound {
    int n = 0;
    int degree = 0;
    double eta = 0.0;
    double iso_lower = 0.0;
    double rank_lower = 0.0;
};

RegularGraph sample_regular_graph(int n, int d, uint64_t seed);

/// Proper d-edge-colouring by repeated perfect-matching extraction.
/// nullopt means the graph should be rejected and resampled.
std::optional<ColoredGraph> edge_color(const RegularGraph &g, int max_attempts, uint64_t seed);

/// Samples graphs until one admits a d-colouring.
ColoredGraph sample_colored_graph(int n, int d, uint64_t seed, int max_attempts = 20);

GridSample sample_grid(int n, uint64_t seed);
GridSample grid_from_transform(int n, std::array<double, 2> offset, double rotation);

ExpansionBound expansion_bound(int n, int d);

int edge_boundary(const RegularGraph &g, const std::vector<int> &subset);

/// Balanced assignment node -> block in [0, b) with a small cut.
std::vector<int> partition_blocks(const RegularGraph &g, int b, uint64_t seed);
int cut_size(const RegularGraph &g, const std::vector<int> &assignment);
std::vector<int> sequential_blocks(int n, int b);

std::string graph_to_json(const ColoredGraph &cg);
ColoredGraph graph_from_json(const std::string &text);

} // namespace rcsw

#endif
