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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <map>
#include <set>
#include <tuple>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/max_cardinality_matching.hpp>

#include "json.hpp"

namespace rcsw {

namespace {

Edge ordered(int u, int v) { return u < v ? Edge{u, v} : Edge{v, u}; }

// Pairing model with incremental rejection. Returns false when stuck.
bool try_pairing(int n, int d, Rng &rng, std::vector<Edge> &out) {
    std::vector<int> points;
    points.reserve(static_cast<size_t>(n) * d);
    for (int v = 0; v < n; ++v)
        for (int k = 0; k < d; ++k) points.push_back(v);
    std::set<Edge> seen;
    out.clear();
    while (!points.empty()) {
        bool placed = false;
        for (int attempt = 0; attempt < 64 && !placed; ++attempt) {
            std::uniform_int_distribution<size_t> pick(0, points.size() - 1);
            size_t a = pick(rng), b = pick(rng);
            if (a == b) continue;
            int u = points[a], v = points[b];
            if (u == v) continue;
            Edge e = ordered(u, v);
            if (seen.count(e)) continue;
            seen.insert(e);
            out.push_back(e);
            if (a < b) std::swap(a, b);
            points[a] = points.back();
            points.pop_back();
            points[b] = points.back();
            points.pop_back();
            placed = true;
        }
        if (!placed) return false;
    }
    return true;
}

// Circulant start plus random double-edge switches.
std::vector<Edge> switch_chain(int n, int d, Rng &rng) {
    std::set<Edge> es;
    for (int i = 0; i < n; ++i) {
        for (int k = 1; k <= d / 2; ++k) es.insert(ordered(i, (i + k) % n));
        if (d % 2 == 1) es.insert(ordered(i, (i + n / 2) % n));
    }
    std::vector<Edge> edges(es.begin(), es.end());
    size_t steps = 20 * edges.size() + 1000;
    std::uniform_int_distribution<size_t> pick(0, edges.size() - 1);
    std::bernoulli_distribution coin(0.5);
    for (size_t s = 0; s < steps; ++s) {
        size_t i = pick(rng), j = pick(rng);
        if (i == j) continue;
        auto [a, b] = edges[i];
        auto [c, e] = edges[j];
        if (coin(rng)) std::swap(c, e);
        if (a == c || a == e || b == c || b == e) continue;
        Edge n1 = ordered(a, c), n2 = ordered(b, e);
        if (es.count(n1) || es.count(n2)) continue;
        es.erase(edges[i]);
        es.erase(edges[j]);
        es.insert(n1);
        es.insert(n2);
        edges[i] = n1;
        edges[j] = n2;
    }
    return edges;
}

} // namespace

std::vector<std::vector<int>> RegularGraph::adjacency() const {
    std::vector<std::vector<int>> adj(n);
    for (auto [u, v] : edges) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    return adj;
}

void RegularGraph::validate() const {
    if (static_cast<long>(edges.size()) * 2 != static_cast<long>(n) * degree)
        throw Error("edge count does not match n*d/2");
    std::vector<int> deg(n, 0);
    std::set<Edge> seen;
    for (auto [u, v] : edges) {
        if (u < 0 || v < 0 || u >= n || v >= n) throw Error("edge endpoint out of range");
        if (u == v) throw Error("self-loop");
        if (!seen.insert(ordered(u, v)).second) throw Error("multi-edge");
        ++deg[u];
        ++deg[v];
    }
    for (int x : deg)
        if (x != degree) throw Error("graph is not regular");
}

int ColoredGraph::num_colors() const {
    std::set<int> s(colors.begin(), colors.end());
    return static_cast<int>(s.size());
}

std::vector<std::vector<Edge>> ColoredGraph::color_classes() const {
    int k = colors.empty() ? 0 : *std::max_element(colors.begin(), colors.end()) + 1;
    std::vector<std::vector<Edge>> out(std::max(k, graph.degree));
    for (size_t i = 0; i < colors.size(); ++i) out[colors[i]].push_back(graph.edges[i]);
    return out;
}

bool ColoredGraph::is_proper() const {
    if (colors.size() != graph.edges.size()) return false;
    std::set<std::pair<int, int>> used; // (node, color)
    for (size_t i = 0; i < colors.size(); ++i) {
        if (colors[i] < 0 || colors[i] >= graph.degree) return false;
        if (!used.insert({graph.edges[i].first, colors[i]}).second) return false;
        if (!used.insert({graph.edges[i].second, colors[i]}).second) return false;
    }
    return true;
}

RegularGraph sample_regular_graph(int n, int d, uint64_t seed) {
    if (n <= 0 || d < 0) throw DegreeError("n must be positive and d nonnegative");
    if ((static_cast<long>(n) * d) % 2 != 0) throw ParityError("n*d must be even");
    if (d >= n) throw DegreeError("degree must be smaller than n");
    RegularGraph g{n, d, {}};
    if (d == 0) return g;
    Rng rng(derive_seed(seed, 0x67726170ULL));
    bool ok = false;
    if (2 * d <= n) {
        for (int restart = 0; restart < 200 && !ok; ++restart) ok = try_pairing(n, d, rng, g.edges);
    }
    if (!ok) g.edges = switch_chain(n, d, rng);
    std::sort(g.edges.begin(), g.edges.end());
    return g;
}

std::optional<ColoredGraph> edge_color(const RegularGraph &g, int max_attempts, uint64_t seed) {
    using BGraph = boost::adjacency_list<boost::vecS, boost::vecS, boost::undirectedS>;
    const int n = g.n, d = g.degree;
    if (d == 0) return ColoredGraph{g, {}};
    if (n % 2 != 0) return std::nullopt;
    std::map<Edge, size_t> index;
    for (size_t i = 0; i < g.edges.size(); ++i) index[g.edges[i]] = i;
    Rng rng(derive_seed(seed, 0x636f6cULL));
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        std::vector<int> color(g.edges.size(), -1);
        std::vector<int> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        bool failed = false;
        for (int c = 0; c < d && !failed; ++c) {
            std::shuffle(perm.begin(), perm.end(), rng);
            std::vector<int> inv(n);
            for (int v = 0; v < n; ++v) inv[perm[v]] = v;
            std::vector<size_t> remaining;
            for (size_t i = 0; i < g.edges.size(); ++i)
                if (color[i] < 0) remaining.push_back(i);
            std::shuffle(remaining.begin(), remaining.end(), rng);
            BGraph bg(n);
            for (size_t i : remaining) boost::add_edge(perm[g.edges[i].first], perm[g.edges[i].second], bg);
            std::vector<boost::graph_traits<BGraph>::vertex_descriptor> mate(n);
            boost::edmonds_maximum_cardinality_matching(bg, &mate[0]);
            for (int pv = 0; pv < n; ++pv) {
                auto pm = mate[pv];
                if (pm == boost::graph_traits<BGraph>::null_vertex()) {
                    failed = true;
                    break;
                }
                int u = inv[pv], v = inv[static_cast<int>(pm)];
                if (u < v) color[index.at(Edge{u, v})] = c;
            }
        }
        if (!failed) return ColoredGraph{g, color};
    }
    return std::nullopt;
}

ColoredGraph sample_colored_graph(int n, int d, uint64_t seed, int max_attempts) {
    for (uint64_t round = 0;; ++round) {
        uint64_t s = round == 0 ? seed : derive_seed(seed, round);
        RegularGraph g = sample_regular_graph(n, d, s);
        if (auto cg = edge_color(g, max_attempts, s)) return *cg;
        if (round > 10000) throw Error("could not find an edge-colourable graph");
    }
}

GridSample grid_from_transform(int n, std::array<double, 2> offset, double rotation) {
    GridSample gs;
    gs.n = n;
    gs.offset = offset;
    gs.rotation = rotation;
    if (n <= 0) return gs;
    // Lattice sites sit at half-integer positions so the origin is a plaquette centre.
    int r = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n)))) + 2;
    struct Cand {
        double dist;
        int i, j;
    };
    std::vector<Cand> cands;
    for (int i = -r; i <= r; ++i) {
        for (int j = -r; j <= r; ++j) {
            double x = i + 0.5 + offset[0], y = j + 0.5 + offset[1];
            cands.push_back({x * x + y * y, i, j});
        }
    }
    std::sort(cands.begin(), cands.end(), [](const Cand &a, const Cand &b) {
        if (std::abs(a.dist - b.dist) > 1e-12) return a.dist < b.dist;
        return std::tie(a.i, a.j) < std::tie(b.i, b.j);
    });
    cands.resize(n);
    std::sort(cands.begin(), cands.end(),
              [](const Cand &a, const Cand &b) { return std::tie(a.j, a.i) < std::tie(b.j, b.i); });
    std::map<std::array<int, 2>, int> id;
    double c = std::cos(rotation), s = std::sin(rotation);
    for (const auto &cd : cands) {
        id[{cd.i, cd.j}] = static_cast<int>(gs.lattice.size());
        gs.lattice.push_back({cd.i, cd.j});
        double x = cd.i + 0.5 + offset[0], y = cd.j + 0.5 + offset[1];
        gs.vertices.push_back({c * x - s * y, s * x + c * y});
    }
    for (size_t a = 0; a < gs.lattice.size(); ++a) {
        auto [i, j] = gs.lattice[a];
        auto h = id.find({i + 1, j});
        if (h != id.end()) {
            gs.edges.push_back(ordered(static_cast<int>(a), h->second));
            gs.colors.push_back((i % 2 + 2) % 2 == 0 ? 0 : 1);
        }
        auto v = id.find({i, j + 1});
        if (v != id.end()) {
            gs.edges.push_back(ordered(static_cast<int>(a), v->second));
            gs.colors.push_back((j % 2 + 2) % 2 == 0 ? 2 : 3);
        }
    }
    return gs;
}

GridSample sample_grid(int n, uint64_t seed) {
    Rng rng(derive_seed(seed, 0x67726964ULL));
    std::uniform_real_distribution<double> off(-0.5, 0.5);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
    double ox = off(rng), oy = off(rng), th = ang(rng);
    return grid_from_transform(n, {ox, oy}, th);
}

ExpansionBound expansion_bound(int n, int d) {
    ExpansionBound b;
    b.n = n;
    b.degree = d;
    b.eta = d > 0 ? 2.0 * std::sqrt(std::log(2.0) / d) : INFINITY;
    b.iso_lower = 0.5 * d * (1.0 - b.eta);
    b.rank_lower = d > 0 ? n * (1.0 - b.eta) / 9.0 : -INFINITY;
    return b;
}

int edge_boundary(const RegularGraph &g, const std::vector<int> &subset) {
    std::vector<char> in(g.n, 0);
    for (int v : subset) in.at(v) = 1;
    int count = 0;
    for (auto [u, v] : g.edges) count += in[u] != in[v];
    return count;
}

std::vector<int> sequential_blocks(int n, int b) {
    std::vector<int> a(n);
    for (int v = 0; v < n; ++v) a[v] = static_cast<int>(static_cast<long>(v) * b / n);
    return a;
}

int cut_size(const RegularGraph &g, const std::vector<int> &assignment) {
    int c = 0;
    for (auto [u, v] : g.edges) c += assignment[u] != assignment[v];
    return c;
}

namespace {

// Best-improvement pairwise swaps until no swap lowers the cut.
void swap_descent(const std::vector<std::vector<int>> &adj, std::vector<int> &a, int b) {
    const int n = static_cast<int>(a.size());
    std::vector<std::vector<int>> links(n, std::vector<int>(b, 0));
    for (int v = 0; v < n; ++v)
        for (int w : adj[v]) ++links[v][a[w]];
    for (;;) {
        int best_gain = 0, bu = -1, bv = -1;
        for (int u = 0; u < n; ++u) {
            for (int v = u + 1; v < n; ++v) {
                int bu_ = a[u], bv_ = a[v];
                if (bu_ == bv_) continue;
                int gain = links[u][bv_] - links[u][bu_] + links[v][bu_] - links[v][bv_];
                int uv = 0;
                for (int w : adj[u]) uv += w == v;
                gain -= 2 * uv;
                if (gain > best_gain) {
                    best_gain = gain;
                    bu = u;
                    bv = v;
                }
            }
        }
        if (bu < 0) return;
        int ba = a[bu], bb = a[bv];
        for (int w : adj[bu]) {
            --links[w][ba];
            ++links[w][bb];
        }
        for (int w : adj[bv]) {
            --links[w][bb];
            ++links[w][ba];
        }
        a[bu] = bb;
        a[bv] = ba;
    }
}

} // namespace

std::vector<int> partition_blocks(const RegularGraph &g, int b, uint64_t seed) {
    if (b <= 0 || b > g.n) throw DomainError("block count must be in [1, n]");
    auto adj = g.adjacency();
    std::vector<int> best = sequential_blocks(g.n, b);
    if (b == 1 || b == g.n) return best;
    swap_descent(adj, best, b);
    int best_cut = cut_size(g, best);
    Rng rng(derive_seed(seed, 0x70617274ULL));
    for (int restart = 0; restart < 8; ++restart) {
        std::vector<int> a = sequential_blocks(g.n, b);
        std::shuffle(a.begin(), a.end(), rng);
        swap_descent(adj, a, b);
        int c = cut_size(g, a);
        if (c < best_cut) {
            best_cut = c;
            best = a;
        }
    }
    return best;
}

std::string graph_to_json(const ColoredGraph &cg) {
    nlohmann::json j;
    j["n"] = cg.graph.n;
    j["d"] = cg.graph.degree;
    j["edges"] = nlohmann::json::array();
    for (auto [u, v] : cg.graph.edges) j["edges"].push_back({u, v});
    j["colors"] = cg.colors;
    return j.dump();
}

ColoredGraph graph_from_json(const std::string &text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error &e) {
        throw ParseError(e.what(), "byte " + std::to_string(e.byte));
    }
    ColoredGraph cg;
    try {
        cg.graph.n = j.at("n").get<int>();
        cg.graph.degree = j.at("d").get<int>();
        for (const auto &e : j.at("edges")) cg.graph.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
        if (j.contains("colors")) cg.colors = j["colors"].get<std::vector<int>>();
    } catch (const nlohmann::json::exception &e) {
        throw ParseError(e.what(), "/");
    }
    for (auto &e : cg.graph.edges) e = ordered(e.first, e.second);
    return cg;
}

} // namespace rcsw
