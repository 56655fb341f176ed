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

#ifndef RCSW_TN_HPP
#define RCSW_TN_HPP

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "rcsw/circuit.hpp"
#include "rcsw/common.hpp"

namespace rcsw {

/// Sorted index ids. Every index has dimension 2.
using IndexSet = std::vector<int>;

/// Bit i of a data offset is the value of indices[i].
struct Tensor {
    IndexSet indices;
    std::vector<cplx> data;
    int gate = -1;  // 2Q gate id in time order, -1 for a bare qubit
    int half = -1;  // 0 or 1 for a split gate, -1 for a whole gate
    int qubit = -1; // qubit of a half or bare-qubit tensor
};

struct TensorNetwork {
    int n_qubits = 0;
    int n_indices = 0;
    int split_rank = 2;
    std::vector<Tensor> tensors;
    IndexSet open;
    std::vector<std::array<int, 2>> gate_qubits; // per 2Q gate id
    std::vector<int> gate_layer;                 // 2Q layer ordinal per gate id
};

/// Closed network for <x|C|0...0>. split_rank 2 cuts every UZZ into two rank-3
/// tensors sharing a bond; split_rank 4 keeps whole gate tensors. 1Q gates and
/// boundary states are absorbed into the neighbouring 2Q tensors.
TensorNetwork circuit_to_tn(const Circuit &c, uint64_t out_bits, int split_rank = 2);

/// Rooted binary tree: leaves are tensors 0..n-1, merge k creates node n+k.
struct ContractionTree {
    int n_leaves = 0;
    std::vector<std::array<int, 2>> merges;
    IndexSet sliced;
    double log2_flops = 0.0; // summed over all 2^|sliced| slices
    int max_rank = 0;        // per slice

    int root() const { return merges.empty() ? 0 : n_leaves + static_cast<int>(merges.size()) - 1; }
    double log2_width() const { return max_rank; }
    std::string to_json() const;
};

struct TreeStats {
    double log2_flops = 0.0;
    int max_rank = 0;          // all nodes, leaves included
    int max_internal_rank = 0; // merged tensors only
};

/// Costs a contraction of result size S over contracted size K as 8 S K real FLOPs.
TreeStats tree_stats(const TensorNetwork &tn, const ContractionTree &tree);

/// Recomputes and stores the totals of `tree`.
void finalize_tree(const TensorNetwork &tn, ContractionTree &tree);

/// Checks that the tree merges every leaf exactly once into a single root.
bool is_valid_tree(const ContractionTree &tree);

enum class OrderMethod { Greedy, Partition, Annealed };

std::string method_name(OrderMethod m);
OrderMethod order_method_from_name(const std::string &s);

struct OptimizerBudget {
    int trials = 16;
    int anneal_sweeps = 200;
};

/// Time-ordered contraction with the two halves of each gate merged first.
ContractionTree statevector_order(const TensorNetwork &tn);

/// Best of `budget.trials` independent randomized trials and the statevector order.
ContractionTree optimize_order(const TensorNetwork &tn, const OptimizerBudget &budget, OrderMethod method,
                               uint64_t seed);

/// Past-causal-cone order over final-layer pairs. An empty pairing picks pairs
/// greedily by fewest new input qubits.
ContractionTree light_cone_order(const TensorNetwork &tn, const std::vector<std::pair<int, int>> &pairing = {});

/// Slices indices until every intermediate fits in 2^log2_width_budget, re-optimizing every
/// four slices. Throws InfeasibleBudget when the budget is below 2 or more than
/// max_sliced indices would be needed.
ContractionTree slice_tree(const TensorNetwork &tn, const ContractionTree &tree, int log2_width_budget,
                           const OptimizerBudget &budget, OrderMethod method, uint64_t seed, int max_sliced = 62);

/// Exact contraction. Throws CapacityError if an intermediate exceeds max_elements.
cplx execute_tree(const TensorNetwork &tn, const ContractionTree &tree, size_t max_elements = size_t{1} << 26);

/// eta(d) = 2 sqrt(ln 2 / d).
double expansion_eta(int d);

/// N (1 - eta(d)) / 9: isoperimetric lower bound on the largest intermediate rank.
double lower_bound_rank(int n, int d);

/// N (1 - 2^-d) + 2: rank guaranteed by the light-cone order.
double light_cone_rank_bound(int n, int d);

enum class Geometry { RG, Grid2D };

struct SimpleCost {
    double density = 0.0;    // complexity density
    double n_eff = 0.0;      // density * N
    double log2_flops = 0.0; // n_eff + log2(N d / 2)
};

/// RG: min(1, 0.125 (d - 2)). 2D: 1.1 min(1, 0.35 d / sqrt N). Clipped at 0.
SimpleCost simple_cost(Geometry g, int n, double d);

/// In D dimensions the effective qubit number grows like d N^{(D-1)/D}.
double area_law_scaling(double d, double n, int dim);

struct EffectiveQubits {
    double n_eff = 0.0;
    int n = 0;
    int d = 0;
};

/// Maximizes the model effective qubit number over N in [n_lo, n_hi] and
/// d <= floor(verifiable_depth(eps, tau, T, N)).
EffectiveQubits max_effective_qubits(double eps, double tau, double t_budget, Geometry g, int n_lo = 2,
                                     int n_hi = 200);

struct CostSummary {
    std::string ensemble;
    int n = 0;
    int d = 0;
    double d_eff = 0.0;
    double log2_flops = 0.0;
    double log2_width = 0.0;
    double log2_flops_sliced = 0.0;
    int width_budget_log2 = 0;
    int sliced_indices = 0;
    double n_eff = 0.0;   // log2(FLOPs / (N d_eff / 2))
    double density = 0.0; // n_eff / N, clipped at 0
    uint64_t seed = 0;

    static std::string csv_header();
    std::string csv_row() const;
};

/// Unsliced figures use the cheaper of `unsliced` and the sliced tree run without slicing.
CostSummary summarize_cost(const Circuit &c, const TensorNetwork &tn, const ContractionTree &unsliced,
                           const ContractionTree &sliced, int width_budget_log2);

} // namespace rcsw

#endif
