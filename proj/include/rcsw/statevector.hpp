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

#ifndef RCSW_STATEVECTOR_HPP
#define RCSW_STATEVECTOR_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "rcsw/circuit.hpp"

namespace rcsw {

constexpr int kDefaultQubitCap = 26;

/// Dense state. Qubit q is bit q of the amplitude index.
struct StateVector {
    int n = 0;
    std::vector<cplx> amp;

    static StateVector zero(int n, int cap = kDefaultQubitCap);
    static StateVector basis(const std::vector<int> &bits, int cap = kDefaultQubitCap);

    double norm2() const;
    std::vector<double> probabilities() const;
    cplx amplitude(uint64_t x) const { return amp[x]; }
};

void apply_1q(StateVector &sv, int q, const Mat2 &m);
void apply_uzz(StateVector &sv, int q0, int q1, double theta);
void apply_pauli(StateVector &sv, int q, int pauli);
void apply_layer(StateVector &sv, const Layer &l);

StateVector run(const Circuit &c, int cap = kDefaultQubitCap);
StateVector run_from(const Circuit &c, StateVector init);

/// Bitstrings as indices (bit q = qubit q).
std::vector<uint64_t> sample(const StateVector &sv, size_t shots, uint64_t seed);
std::vector<uint64_t> sample_probs(const std::vector<double> &probs, size_t shots, Rng &rng);
std::string bitstring(uint64_t x, int n);
uint64_t bits_to_index(const std::vector<int> &bits);

struct PorterThomasStats {
    double second_moment = 0.0; // 2^N sum P^2 - 1
    std::vector<double> bin_edges;
    std::vector<double> density; // histogram of 2^N P normalised as a density
};

PorterThomasStats porter_thomas_stats(const StateVector &sv, int bins = 40, double max_value = 8.0);

double bipartite_purity(const StateVector &sv, const std::vector<int> &subset);

/// Independent per-qubit readout flips with probability p applied to a distribution.
std::vector<double> apply_readout_noise(const std::vector<double> &probs, int n, double p);

struct NoiseModel {
    double eps_2q = 0.0;                 // Pauli error probability after each entangling gate
    std::array<double, 15> pauli_weights; // relative weights of the 15 non-identity Paulis
    double eps_mem = 0.0;                // average infidelity of the per-layer dephasing
    int mem_sign = +1;
    double eps_1q = 0.0; // depolarising probability after each 1Q gate
    double p_spam = 0.0; // readout flip probability
    bool scale_by_56_over_n = false;

    NoiseModel();
    /// Average infidelities -> Pauli probabilities (process = 5/4 average for two qubits).
    static NoiseModel from_infidelities(double avg_2q, double avg_mem, double avg_1q = 0.0, double spam = 0.0,
                                        bool scale = false);
    double scale(int n) const { return scale_by_56_over_n && n > 0 ? 56.0 / n : 1.0; }
    double mem_angle(int n) const;
    bool is_noiseless() const;
};

struct TrajectoryResult {
    double fidelity = 0.0; // mean |<psi_ideal|psi_t>|^2
    double fidelity_se = 0.0;
    std::vector<double> per_traj_fidelity;
    std::vector<double> per_traj_xeb;    // 2^N sum_x p_t(x) P(x) - 1
    std::vector<double> per_traj_return; // probability of the recorded initial bits (if any)
    std::vector<std::vector<uint64_t>> samples;
    double xeb_mean = 0.0;
    double return_mean = 0.0;
};

TrajectoryResult run_trajectories(const Circuit &c, const NoiseModel &nm, int n_traj, uint64_t seed,
                                  int shots_per_traj = 0, int cap = kDefaultQubitCap);

/// Simulates the subset of OpenQASM 2.0 produced by export_qasm.
StateVector simulate_qasm(const std::string &text, int cap = kDefaultQubitCap);

} // namespace rcsw

#endif
