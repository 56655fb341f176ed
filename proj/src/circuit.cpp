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
#include <cstdio>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"

namespace rcsw {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI(0.0, 1.0);

using LayerMats = std::vector<Mat2>;

LayerMats identity_layer(int n) { return LayerMats(n, Mat2::Identity()); }

LayerMats layer_mats(const Layer &l, int n) {
    LayerMats m = identity_layer(n);
    for (const auto &g : l.one) m[g.q] = gate_matrix(g) * m[g.q];
    return m;
}

Layer layer_from_mats(const LayerMats &m) {
    Layer l;
    l.type = Layer::Type::OneQ;
    for (int q = 0; q < static_cast<int>(m.size()); ++q) l.one.push_back(decompose_1q(m[q], q));
    return l;
}

Layer random_1q_layer(int n, Rng &rng) {
    Layer l;
    l.type = Layer::Type::OneQ;
    for (int q = 0; q < n; ++q) l.one.push_back(haar_su2(rng, q));
    return l;
}

Mat4 kron(const Mat2 &a, const Mat2 &b) {
    Mat4 k;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int r = 0; r < 2; ++r)
                for (int s = 0; s < 2; ++s) k(2 * i + r, 2 * j + s) = a(i, j) * b(r, s);
    return k;
}

// Finds Paulis (a, b) with M proportional to P_a (x) P_b, or (-1, -1).
std::pair<int, int> identify_pauli(const Mat4 &m) {
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            cplx t = (kron(pauli_matrix(a), pauli_matrix(b)).adjoint() * m).trace() / 4.0;
            if (std::abs(std::abs(t) - 1.0) < 1e-9) return {a, b};
        }
    return {-1, -1};
}

bool is_clifford_angle(double theta) {
    double k = theta / (kPi / 2);
    return std::abs(k - std::round(k)) < 1e-12;
}

} // namespace

std::string ensemble_name(Ensemble e) {
    switch (e) {
    case Ensemble::RG: return "rg";
    case Ensemble::Grid2D: return "2d";
    case Ensemble::Mirror: return "mirror";
    case Ensemble::TransportRB: return "transport_rb";
    case Ensemble::Brickwork1D: return "1d";
    }
    return "rg";
}

Ensemble ensemble_from_name(const std::string &s) {
    if (s == "rg") return Ensemble::RG;
    if (s == "2d") return Ensemble::Grid2D;
    if (s == "mirror") return Ensemble::Mirror;
    if (s == "transport_rb") return Ensemble::TransportRB;
    if (s == "1d") return Ensemble::Brickwork1D;
    throw DomainError("unknown ensemble '" + s + "'");
}

int Circuit::num_2q() const {
    int c = 0;
    for (const auto &l : layers) c += static_cast<int>(l.two.size());
    return c;
}

int Circuit::num_2q_layers() const {
    int c = 0;
    for (const auto &l : layers) c += l.type == Layer::Type::TwoQ;
    return c;
}

int Circuit::num_1q_layers() const {
    return static_cast<int>(layers.size()) - num_2q_layers();
}

double Circuit::d_eff() const { return n > 0 ? num_2q() / (n / 2.0) : 0.0; }

Mat2 rz_matrix(double psi) {
    Mat2 m;
    m << std::exp(-kI * (psi / 2)), 0.0, 0.0, std::exp(kI * (psi / 2));
    return m;
}

Mat2 u1q_matrix(double theta, double phi) {
    double c = std::cos(theta / 2), s = std::sin(theta / 2);
    Mat2 m;
    m << c, -kI * s * std::exp(-kI * phi), -kI * s * std::exp(kI * phi), c;
    return m;
}

Mat2 gate_matrix(const Gate1Q &g) { return rz_matrix(g.psi) * u1q_matrix(g.theta, g.phi); }

Mat2 pauli_matrix(int p) {
    Mat2 m;
    switch (p) {
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, -kI, kI, 0; break;
    case 3: m << 1, 0, 0, -1; break;
    default: m = Mat2::Identity();
    }
    return m;
}

Mat4 uzz_matrix(double theta) {
    Mat4 m = Mat4::Zero();
    cplx a = std::exp(-kI * (theta / 2)), b = std::exp(kI * (theta / 2));
    m(0, 0) = a;
    m(1, 1) = b;
    m(2, 2) = b;
    m(3, 3) = a;
    return m;
}

Gate1Q decompose_1q(const Mat2 &u, int q) {
    Mat2 v = u / std::sqrt(u.determinant());
    cplx a = v(0, 0), b = v(1, 0);
    Gate1Q g;
    g.q = q;
    g.theta = 2.0 * std::atan2(std::abs(b), std::abs(a));
    g.psi = std::abs(a) > 1e-14 ? -2.0 * std::arg(a) : 0.0;
    if (std::abs(b) > 1e-14) {
        g.phi = std::arg(b) + kPi / 2 - g.psi / 2;
    } else {
        g.phi = 0.0;
    }
    if (std::abs(a) <= 1e-14) {
        // theta = pi: only phi + psi/2 is fixed; choose psi = 0.
        g.psi = 0.0;
        g.phi = std::arg(b) + kPi / 2;
    }
    g.phi = std::remainder(g.phi, 2 * kPi);
    g.psi = std::remainder(g.psi, 4 * kPi);
    return g;
}

Gate1Q haar_su2(Rng &rng, int q) {
    std::normal_distribution<double> gauss;
    double x[4], norm = 0;
    for (double &v : x) {
        v = gauss(rng);
        norm += v * v;
    }
    norm = std::sqrt(norm);
    cplx a(x[0] / norm, x[1] / norm), b(x[2] / norm, x[3] / norm);
    Mat2 u;
    u << a, -std::conj(b), b, std::conj(a);
    return decompose_1q(u, q);
}

Gate1Q haar_su2(uint64_t seed) {
    Rng rng(derive_seed(seed, 0x68616172ULL));
    return haar_su2(rng, 0);
}

Circuit build_rg_circuit(const ColoredGraph &cg, uint64_t seed, int depth) {
    if (depth > 0 && cg.graph.degree == 0) throw DomainError("cannot repeat the layers of an empty graph");
    Circuit c;
    c.n = cg.graph.n;
    c.d = depth < 0 ? cg.graph.degree : depth;
    c.ensemble = Ensemble::RG;
    c.seed = seed;
    c.graph = cg;
    Rng rng(derive_seed(seed, 0x7267ULL));
    auto classes = cg.color_classes();
    c.layers.push_back(random_1q_layer(c.n, rng));
    for (int j = 0; j < c.d; ++j) {
        Layer e;
        e.type = Layer::Type::TwoQ;
        for (auto [u, v] : classes[j % cg.graph.degree]) e.two.push_back({u, v, kPi / 2});
        c.layers.push_back(std::move(e));
        c.layers.push_back(random_1q_layer(c.n, rng));
    }
    return c;
}

Circuit build_2d_circuit(const GridSample &gs, int d, uint64_t seed) {
    if (d < 0) throw DomainError("depth must be nonnegative");
    Circuit c;
    c.n = gs.n;
    c.d = d;
    c.ensemble = Ensemble::Grid2D;
    c.seed = seed;
    Rng rng(derive_seed(seed, 0x3264ULL));
    c.layers.push_back(random_1q_layer(c.n, rng));
    for (int t = 0; t < d; ++t) {
        Layer e;
        e.type = Layer::Type::TwoQ;
        for (size_t i = 0; i < gs.edges.size(); ++i)
            if (gs.colors[i] == t % 4) e.two.push_back({gs.edges[i].first, gs.edges[i].second, kPi / 2});
        c.layers.push_back(std::move(e));
        c.layers.push_back(random_1q_layer(c.n, rng));
    }
    return c;
}

Circuit build_brickwork_circuit(int n, int d, uint64_t seed) {
    if (n < 2 || d < 0) throw DomainError("brickwork needs n >= 2 and d >= 0");
    Circuit c;
    c.n = n;
    c.d = d;
    c.ensemble = Ensemble::Brickwork1D;
    c.seed = seed;
    Rng rng(derive_seed(seed, 0x3164ULL));
    c.layers.push_back(random_1q_layer(n, rng));
    for (int t = 0; t < d; ++t) {
        Layer e;
        e.type = Layer::Type::TwoQ;
        for (int i = t % 2; i + 1 < n; i += 2) e.two.push_back({i, i + 1, kPi / 2});
        c.layers.push_back(std::move(e));
        c.layers.push_back(random_1q_layer(n, rng));
    }
    return c;
}

Circuit build_mirror(const Circuit &c, uint64_t seed, std::vector<PauliFrame> *frames) {
    const int n = c.n;
    Rng rng(derive_seed(seed, 0x6d6972ULL));
    std::bernoulli_distribution coin(0.5);
    std::uniform_int_distribution<int> pauli(0, 3);
    std::vector<int> bits(n);
    for (int &b : bits) b = coin(rng);

    // Raw sequence; consecutive 1Q layers are merged afterwards.
    struct Slot {
        bool two;
        LayerMats mats;
        Layer layer;
    };
    std::vector<Slot> seq;
    LayerMats xb = identity_layer(n);
    for (int q = 0; q < n; ++q)
        if (bits[q]) xb[q] = pauli_matrix(1);
    seq.push_back({false, xb, {}});
    for (const auto &l : c.layers) {
        if (l.type == Layer::Type::OneQ)
            seq.push_back({false, layer_mats(l, n), {}});
        else
            seq.push_back({true, {}, l});
    }
    if (frames) frames->clear();
    for (auto it = c.layers.rbegin(); it != c.layers.rend(); ++it) {
        if (it->type == Layer::Type::OneQ) {
            LayerMats m = layer_mats(*it, n);
            for (auto &x : m) x = x.adjoint().eval();
            seq.push_back({false, m, {}});
            continue;
        }
        LayerMats pre = identity_layer(n), post = identity_layer(n);
        PauliFrame frame{std::vector<int>(n, 0)};
        Layer rev;
        rev.type = Layer::Type::TwoQ;
        for (const auto &g : it->two) {
            if (!is_clifford_angle(g.theta)) {
                rev.two.push_back({g.q0, g.q1, -g.theta});
                continue;
            }
            // UZZ(-t) = UZZ(t) UZZ(-2t) and UZZ(-m pi) is (Z (x) Z)^m up to phase.
            double phys = g.theta;
            long m = std::lround(g.theta / (kPi / 2));
            Mat2 fold = (m % 2 != 0) ? pauli_matrix(3) : Mat2::Identity();
            int pa = pauli(rng), pb = pauli(rng);
            frame.pauli[g.q0] = pa;
            frame.pauli[g.q1] = pb;
            pre[g.q0] = pauli_matrix(pa) * fold;
            pre[g.q1] = pauli_matrix(pb) * fold;
            Mat4 u = uzz_matrix(phys);
            Mat4 q = u * kron(pauli_matrix(pa), pauli_matrix(pb)) * u.adjoint();
            auto [qa, qb] = identify_pauli(q);
            post[g.q0] = pauli_matrix(qa);
            post[g.q1] = pauli_matrix(qb);
            rev.two.push_back({g.q0, g.q1, phys});
        }
        if (frames) frames->push_back(frame);
        seq.push_back({false, pre, {}});
        seq.push_back({true, {}, rev});
        seq.push_back({false, post, {}});
    }

    Circuit m;
    m.n = n;
    m.d = 2 * c.num_2q_layers();
    m.ensemble = Ensemble::Mirror;
    m.seed = seed;
    m.graph = c.graph;
    m.initial_bits = bits;
    LayerMats acc;
    bool pending = false;
    for (auto &s : seq) {
        if (s.two) {
            m.layers.push_back(layer_from_mats(pending ? acc : identity_layer(n)));
            pending = false;
            m.layers.push_back(std::move(s.layer));
        } else {
            if (!pending) {
                acc = identity_layer(n);
                pending = true;
            }
            for (int q = 0; q < n; ++q) acc[q] = s.mats[q] * acc[q];
        }
    }
    m.layers.push_back(layer_from_mats(pending ? acc : identity_layer(n)));
    return m;
}

Circuit build_transport_rb(const Circuit &c, const std::vector<int> &initial_bits, uint64_t seed) {
    const int n = c.n;
    if (static_cast<int>(initial_bits.size()) != n) throw DomainError("initial_bits must have one entry per qubit");
    Circuit t = c;
    t.ensemble = Ensemble::TransportRB;
    t.seed = seed;
    t.initial_bits = initial_bits;
    for (auto &l : t.layers)
        for (auto &g : l.two) g.theta = 0.0;
    std::vector<size_t> one_idx;
    for (size_t i = 0; i < t.layers.size(); ++i)
        if (t.layers[i].type == Layer::Type::OneQ) one_idx.push_back(i);
    LayerMats xb = identity_layer(n);
    for (int q = 0; q < n; ++q)
        if (initial_bits[q]) xb[q] = pauli_matrix(1);
    if (one_idx.empty()) {
        t.layers.insert(t.layers.begin(), layer_from_mats(xb));
        return t;
    }
    if (one_idx.size() == 1) {
        t.layers[one_idx[0]] = layer_from_mats(xb);
        return t;
    }
    LayerMats cum = identity_layer(n);
    for (size_t k = 0; k + 1 < one_idx.size(); ++k) {
        LayerMats m = layer_mats(c.layers[one_idx[k]], n);
        for (int q = 0; q < n; ++q) cum[q] = m[q] * cum[q];
    }
    LayerMats first = layer_mats(c.layers[one_idx.front()], n);
    for (int q = 0; q < n; ++q) {
        first[q] = first[q] * xb[q];
        cum[q] = cum[q].adjoint().eval();
    }
    t.layers[one_idx.front()] = layer_from_mats(first);
    t.layers[one_idx.back()] = layer_from_mats(cum);
    return t;
}

Circuit make_circuit(Ensemble e, int n, int d, uint64_t seed) {
    switch (e) {
    case Ensemble::RG:
        if (d >= n && n > 1) return build_rg_circuit(sample_colored_graph(n, n - 1, seed), seed, d);
        return build_rg_circuit(sample_colored_graph(n, d, seed), seed);
    case Ensemble::Grid2D: return build_2d_circuit(sample_grid(n, seed), d, seed);
    case Ensemble::Brickwork1D: return build_brickwork_circuit(n, d, seed);
    case Ensemble::Mirror: return build_mirror(make_circuit(Ensemble::RG, n, d / 2, seed), derive_seed(seed, 1));
    case Ensemble::TransportRB: break;
    }
    throw DomainError("ensemble " + ensemble_name(e) + " needs explicit construction");
}

std::string to_json(const Circuit &c) {
    using nlohmann::json;
    json j;
    j["n"] = c.n;
    j["d"] = c.d;
    j["ensemble"] = ensemble_name(c.ensemble);
    j["seed"] = c.seed;
    if (c.graph) j["graph"] = json::parse(graph_to_json(*c.graph));
    j["layers"] = json::array();
    for (const auto &l : c.layers) {
        json jl;
        if (l.type == Layer::Type::OneQ) {
            jl["type"] = "1q";
            jl["gates"] = json::array();
            for (const auto &g : l.one)
                jl["gates"].push_back({{"q", g.q}, {"psi", g.psi}, {"theta", g.theta}, {"phi", g.phi}});
        } else {
            jl["type"] = "2q";
            jl["gates"] = json::array();
            for (const auto &g : l.two) jl["gates"].push_back({{"q0", g.q0}, {"q1", g.q1}, {"theta", g.theta}});
        }
        j["layers"].push_back(std::move(jl));
    }
    if (c.initial_bits) j["initial_bits"] = *c.initial_bits;
    return j.dump(1);
}

namespace {

const nlohmann::json &field(const nlohmann::json &j, const char *key, const std::string &path) {
    if (!j.is_object()) throw ParseError("expected object", path.empty() ? "/" : path);
    auto it = j.find(key);
    if (it == j.end()) throw ParseError(std::string("missing field '") + key + "'", path + "/" + key);
    return *it;
}

template <class T>
T number(const nlohmann::json &j, const char *key, const std::string &path) {
    const auto &v = field(j, key, path);
    if (!v.is_number()) throw ParseError(std::string("field '") + key + "' is not a number", path + "/" + key);
    return v.get<T>();
}

} // namespace

Circuit circuit_from_json(const std::string &text) {
    using nlohmann::json;
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error &e) {
        throw ParseError(e.what(), "byte " + std::to_string(e.byte));
    }
    Circuit c;
    c.n = number<int>(j, "n", "");
    if (c.n < 0) throw ParseError("negative qubit count", "/n");
    c.d = number<int>(j, "d", "");
    const auto &ens = field(j, "ensemble", "");
    try {
        c.ensemble = ensemble_from_name(ens.get<std::string>());
    } catch (const std::exception &e) {
        throw ParseError(e.what(), "/ensemble");
    }
    c.seed = number<uint64_t>(j, "seed", "");
    if (j.contains("graph")) {
        try {
            c.graph = graph_from_json(j["graph"].dump());
        } catch (const ParseError &e) {
            throw ParseError(e.what(), "/graph");
        }
    }
    const auto &layers = field(j, "layers", "");
    if (!layers.is_array()) throw ParseError("layers must be an array", "/layers");
    for (size_t li = 0; li < layers.size(); ++li) {
        std::string lp = "/layers/" + std::to_string(li);
        const auto &jl = layers[li];
        const auto &type = field(jl, "type", lp);
        const auto &gates = field(jl, "gates", lp);
        if (!gates.is_array()) throw ParseError("gates must be an array", lp + "/gates");
        Layer l;
        std::set<int> used;
        if (type == "1q") {
            l.type = Layer::Type::OneQ;
            for (size_t gi = 0; gi < gates.size(); ++gi) {
                std::string gp = lp + "/gates/" + std::to_string(gi);
                Gate1Q g{number<int>(gates[gi], "q", gp), number<double>(gates[gi], "psi", gp),
                         number<double>(gates[gi], "theta", gp), number<double>(gates[gi], "phi", gp)};
                if (g.q < 0 || g.q >= c.n) throw ParseError("qubit out of range", gp + "/q");
                if (!used.insert(g.q).second) throw ParseError("qubit used twice in layer", gp + "/q");
                l.one.push_back(g);
            }
        } else if (type == "2q") {
            l.type = Layer::Type::TwoQ;
            for (size_t gi = 0; gi < gates.size(); ++gi) {
                std::string gp = lp + "/gates/" + std::to_string(gi);
                Gate2Q g{number<int>(gates[gi], "q0", gp), number<int>(gates[gi], "q1", gp),
                         number<double>(gates[gi], "theta", gp)};
                if (g.q0 < 0 || g.q0 >= c.n) throw ParseError("qubit out of range", gp + "/q0");
                if (g.q1 < 0 || g.q1 >= c.n || g.q1 == g.q0) throw ParseError("bad second qubit", gp + "/q1");
                if (!used.insert(g.q0).second || !used.insert(g.q1).second)
                    throw ParseError("overlapping 2q gates", gp);
                l.two.push_back(g);
            }
        } else {
            throw ParseError("unknown layer type", lp + "/type");
        }
        c.layers.push_back(std::move(l));
    }
    if (j.contains("initial_bits")) {
        const auto &b = j["initial_bits"];
        if (!b.is_array() || static_cast<int>(b.size()) != c.n)
            throw ParseError("initial_bits must be an array of length n", "/initial_bits");
        std::vector<int> bits;
        for (size_t i = 0; i < b.size(); ++i) {
            if (!b[i].is_number_integer() || (b[i] != 0 && b[i] != 1))
                throw ParseError("bits must be 0 or 1", "/initial_bits/" + std::to_string(i));
            bits.push_back(b[i].get<int>());
        }
        c.initial_bits = bits;
    }
    return c;
}

std::string export_qasm(const Circuit &c) {
    std::ostringstream out;
    char buf[160];
    out << "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";
    out << "qreg q[" << c.n << "];\ncreg c[" << c.n << "];\n";
    for (const auto &l : c.layers) {
        for (const auto &g : l.one) {
            std::snprintf(buf, sizeof buf, "u3(%.17g,%.17g,%.17g) q[%d];\n", g.theta, g.phi - kPi / 2,
                          kPi / 2 - g.phi, g.q);
            out << buf;
            std::snprintf(buf, sizeof buf, "rz(%.17g) q[%d];\n", g.psi, g.q);
            out << buf;
        }
        for (const auto &g : l.two) {
            std::snprintf(buf, sizeof buf, "rzz(%.17g) q[%d],q[%d];\n", g.theta, g.q0, g.q1);
            out << buf;
        }
        out << "barrier q;\n";
    }
    out << "measure q -> c;\n";
    return out.str();
}

} // namespace rcsw
