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

#ifndef RCSW_MPS_HPP
#define RCSW_MPS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "rcsw/circuit.hpp"
#include "rcsw/common.hpp"
#include "rcsw/statevector.hpp"

namespace rcsw {

/// One chain site: a block of qubits with tensor (left bond, 2^|qubits|, right bond),
/// stored column-major. Bit k of the physical index is qubits[k].
struct MpsSite {
    std::vector<int> qubits;
    int dl = 1;
    int dr = 1;
    std::vector<cplx> data;

    int phys() const { return 1 << qubits.size(); }
};

struct MpsState {
    int n = 0;
    int chi = 1;
    std::vector<MpsSite> sites; // chain order; swaps permute blocks
    int center = 0;             // orthogonality centre
    double f_acc = 1.0;         // product of (1 - discarded weight)
    int truncations = 0;        // SVDs that discarded weight
    double flops = 0.0;
    size_t max_elements = size_t{1} << 26;

    /// Product state over the given blocks.
    static MpsState product(const std::vector<std::vector<int>> &blocks, uint64_t bits, int chi);

    int max_bond() const;
    /// Dense amplitudes (bit q = qubit q). Small N only.
    StateVector to_statevector() const;
    /// Block positions as in `blocks` order, by swaps truncated at chi.
    void restore_order(const std::vector<std::vector<int>> &blocks);
};

struct MpsRunReport {
    int n = 0;
    int d = 0;
    int chi = 0;
    int blocks = 0;
    std::string blocking; // "b x [sizes]"
    double f_mps = 1.0;
    double eps_mps = 0.0;
    double flops_est = 0.0;
    int n_2q = 0;
    uint64_t seed = 0;

    static std::string csv_header();
    std::string csv_row() const;
};

/// ceil(N/6) blocks, at least two (one for N < 2).
int default_mps_blocks(int n);

/// Balanced qubit blocks with a small inter-block cut over the circuit's 2Q gate graph.
std::vector<std::vector<int>> mps_blocks(const Circuit &c, int n_blocks, uint64_t seed);

void mps_apply_1q(MpsState &s, int q, const Mat2 &m);
/// Applies a set of UZZ gates that all touch the same pair of blocks (or one block).
void mps_apply_uzz_group(MpsState &s, const std::vector<Gate2Q> &gates);
void mps_apply_layer(MpsState &s, const Layer &l);

struct MpsResult {
    MpsState state;
    MpsRunReport report;
};

/// Evolves |0...0> through `c`, truncating every two-site update to chi.
/// Throws CapacityError when a two-site tensor would exceed max_elements.
MpsResult evolve(const Circuit &c, int chi, int n_blocks, uint64_t seed, size_t max_elements = size_t{1} << 26);

/// 1 - F^{1/n_2q}; zero when there are no 2Q gates.
double eps_from_fidelity(double f, int n_2q);

struct SplitAmplitude {
    cplx amplitude;
    double f_forward = 1.0;
    double f_backward = 1.0;
    double fidelity = 1.0; // f_forward * f_backward
};

/// <x|C|0> as the overlap of |0> evolved through the first ceil(d/2) 2Q layers
/// and |x> evolved backwards through the rest.
SplitAmplitude split_amplitude(const Circuit &c, uint64_t x, int chi, int n_blocks, uint64_t seed);

/// F / Tr(rho^2): smallest bond dimension compatible with fidelity F.
double bond_bound(double f_target, double purity);

/// Purity of the reduced state on the left half of the final chain order.
double chain_half_purity(const MpsState &s, const StateVector &exact);

/// Samples bitstrings from the largest ceil(alpha 2^N) estimated probabilities
/// (renormalised) and scores them against the exact distribution. Averages over circuits.
double topk_postprocess(const std::vector<std::vector<double>> &estimated,
                        const std::vector<std::vector<double>> &exact, int n, double alpha, size_t shots,
                        uint64_t seed);

struct EpsChiRow {
    int chi = 0;
    int blocks = 0;
    double median = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
};

struct EpsChiTable {
    std::vector<EpsChiRow> rows;
    /// Per blocking, log2 chi reaching the target eps by a line through the two largest chi.
    std::vector<double> log2_chi_at_target;
};

/// Groups runs by requested block count, then chi (ascending).
EpsChiTable tabulate_eps_chi(const std::vector<MpsRunReport> &runs, double target_eps);

EpsChiTable epsilon_vs_chi(const std::vector<Circuit> &circuits, const std::vector<int> &chis,
                           const std::vector<int> &block_counts, double target_eps, uint64_t seed);

} // namespace rcsw

#endif
