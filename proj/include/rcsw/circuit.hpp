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

#ifndef RCSW_CIRCUIT_HPP
#define RCSW_CIRCUIT_HPP

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rcsw/common.hpp"
#include "rcsw/graph.hpp"

namespace rcsw {

using Mat2 = Eigen::Matrix2cd;
using Mat4 = Eigen::Matrix4cd;

/// S = Rz(psi) * U1q(theta, phi) acting on qubit q.
struct Gate1Q {
    int q = 0;
    double psi = 0.0;
    double theta = 0.0;
    double phi = 0.0;
    bool operator==(const Gate1Q &) const = default;
};

/// UZZ(theta) = exp(-i theta/2 Z (x) Z).
struct Gate2Q {
    int q0 = 0;
    int q1 = 1;
    double theta = 0.0;
    bool operator==(const Gate2Q &) const = default;
};

struct Layer {
    enum class Type { OneQ, TwoQ };
    Type type = Type::OneQ;
    std::vector<Gate1Q> one;
    std::vector<Gate2Q> two;
    bool operator==(const Layer &) const = default;
};

enum class Ensemble { RG, Grid2D, Mirror, TransportRB, Brickwork1D };

std::string ensemble_name(Ensemble e);
Ensemble ensemble_from_name(const std::string &s);

struct Circuit {
    int n = 0;
    int d = 0;
    Ensemble ensemble = Ensemble::RG;
    uint64_t seed = 0;
    std::optional<ColoredGraph> graph;
    std::vector<Layer> layers;
    std::optional<std::vector<int>> initial_bits;

    int num_2q() const;
    int num_2q_layers() const;
    int num_1q_layers() const;
    double d_eff() const;
};

/// Per-qubit Pauli labels (0=I, 1=X, 2=Y, 3=Z) inserted before one reverse 2Q layer.
struct PauliFrame {
    std::vector<int> pauli;
};

Mat2 rz_matrix(double psi);
Mat2 u1q_matrix(double theta, double phi);
Mat2 gate_matrix(const Gate1Q &g);
Mat2 pauli_matrix(int p);
Mat4 uzz_matrix(double theta);

/// Decomposes any 2x2 unitary into (psi, theta, phi), exact up to global phase.
Gate1Q decompose_1q(const Mat2 &u, int q);

Gate1Q haar_su2(Rng &rng, int q = 0);
Gate1Q haar_su2(uint64_t seed);

/// `depth` defaults to the graph degree; deeper circuits cycle through the colour classes.
Circuit build_rg_circuit(const ColoredGraph &cg, uint64_t seed, int depth = -1);
Circuit build_2d_circuit(const GridSample &gs, int d, uint64_t seed);
/// Open-boundary 1D brickwork: layer t gates pairs (i, i+1) with i = t mod 2.
Circuit build_brickwork_circuit(int n, int d, uint64_t seed);

/// Forward circuit followed by its Pauli-twirled inverse; the ideal output is
/// the recorded initial bitstring.
Circuit build_mirror(const Circuit &c, uint64_t seed, std::vector<PauliFrame> *frames = nullptr);

Circuit build_transport_rb(const Circuit &c, const std::vector<int> &initial_bits, uint64_t seed);

/// One instance of an ensemble: rg, 2d, 1d, or mirror (a depth-d/2 rg circuit and its inverse).
/// For rg with d >= n the graph is (n-1)-regular and its layers repeat cyclically.
Circuit make_circuit(Ensemble e, int n, int d, uint64_t seed);

std::string to_json(const Circuit &c);
Circuit circuit_from_json(const std::string &text);
std::string export_qasm(const Circuit &c);

} // namespace rcsw

#endif
