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

#include <algorithm>
#include <bitset>
#include <cmath>
#include <numeric>
#include <queue>
#include <tuple>
#include <unordered_map>

#include "rcsw/tn.hpp"

namespace rcsw {

std::string method_name(OrderMethod m) {
    switch (m) {
    case OrderMethod::Greedy: return "greedy";
    case OrderMethod::Partition: return "partition";
    case OrderMethod::Annealed: return "annealed";
    }
    return "greedy";
}

OrderMethod order_method_from_name(const std::string &s) {
    if (s == "greedy") return OrderMethod::Greedy;
    if (s == "partition") return OrderMethod::Partition;
    if (s == "annealed") return OrderMethod::Annealed;
    throw DomainError("unknown optimizer method '" + s + "'");
}

namespace {

int union_size(const IndexSet &a, const IndexSet &b) {
    int common = 0;
    size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] < b[j]) {
            ++i;
        } else if (b[j] < a[i]) {
            ++j;
        } else {
            ++common;
            ++i;
            ++j;
        }
    }
    return static_cast<int>(a.size() + b.size()) - common;
}

IndexSet sym_diff(const IndexSet &a, const IndexSet &b) {
    IndexSet out;
    out.reserve(a.size() + b.size());
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

IndexSet without(const IndexSet &a, const IndexSet &sliced) {
    if (sliced.empty()) return a;
    IndexSet out;
    std::set_difference(a.begin(), a.end(), sliced.begin(), sliced.end(), std::back_inserter(out));
    return out;
}

struct Builder {
    int n = 0;
    std::vector<std::array<int, 2>> merges;
    int merge(int a, int b) {
        merges.push_back({a, b});
        return n + static_cast<int>(merges.size()) - 1;
    }
    ContractionTree tree() const {
        ContractionTree t;
        t.n_leaves = n;
        t.merges = merges;
        return t;
    }
};

struct GreedyParams {
    double alpha = 1.0;
    double temperature = 0.0;
};

double gumbel(Rng &rng) {
    std::uniform_real_distribution<double> u(1e-300, 1.0);
    return -std::log(-std::log(u(rng)));
}

// Greedy pairwise merging of `nodes` (tree node ids with index sets `sets`). Returns the root id.
int greedy_combine(Builder &b, const std::vector<int> &nodes, std::vector<IndexSet> sets, const GreedyParams &p,
                   Rng &rng) {
    const int m = static_cast<int>(nodes.size());
    if (m == 1) return nodes[0];
    std::vector<int> id(nodes);
    std::vector<char> alive(m, 1);
    id.reserve(2 * m);
    sets.reserve(2 * m);
    alive.reserve(2 * m);
    std::unordered_map<int, std::vector<int>> owner;
    for (int i = 0; i < m; ++i)
        for (int x : sets[i]) owner[x].push_back(i);
    struct Cand {
        double key;
        int a, b;
        bool operator<(const Cand &o) const { return key > o.key; }
    };
    std::priority_queue<Cand> pq;
    auto push = [&](int a, int c) {
        int un = union_size(sets[a], sets[c]);
        int common = static_cast<int>(sets[a].size() + sets[c].size()) - un;
        double sab = std::exp2(un - common), sa = std::exp2(sets[a].size()), sc = std::exp2(sets[c].size());
        double s = sab - p.alpha * (sa + sc);
        double key = (s < 0 ? -1.0 : 1.0) * std::log2(1.0 + std::abs(s));
        if (p.temperature > 0) key -= p.temperature * gumbel(rng);
        pq.push({key, a, c});
    };
    for (const auto &[x, own] : owner)
        if (own.size() == 2) push(own[0], own[1]);
    int remaining = m;
    while (!pq.empty()) {
        Cand c = pq.top();
        pq.pop();
        if (!alive[c.a] || !alive[c.b]) continue;
        int k = static_cast<int>(sets.size());
        sets.push_back(sym_diff(sets[c.a], sets[c.b]));
        id.push_back(b.merge(id[c.a], id[c.b]));
        alive.push_back(1);
        alive[c.a] = alive[c.b] = 0;
        --remaining;
        for (int src : {c.a, c.b})
            for (int x : sets[src]) {
                auto &own = owner[x];
                own.erase(std::remove(own.begin(), own.end(), src), own.end());
            }
        std::vector<int> nb;
        for (int x : sets[k]) {
            auto &own = owner[x];
            for (int o : own) nb.push_back(o);
            own.push_back(k);
        }
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
        for (int o : nb) push(o, k);
    }
    // disconnected pieces: outer products, smallest first
    using Item = std::pair<size_t, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> rest;
    for (int i = 0; i < static_cast<int>(sets.size()); ++i)
        if (alive[i]) rest.push({sets[i].size(), i});
    while (rest.size() > 1) {
        auto [sa, a] = rest.top();
        rest.pop();
        auto [sc, c] = rest.top();
        rest.pop();
        int k = static_cast<int>(sets.size());
        sets.push_back(sym_diff(sets[a], sets[c]));
        id.push_back(b.merge(id[a], id[c]));
        rest.push({sets[k].size(), k});
    }
    return id[rest.top().second];
}

// Leaf -> index sets and index -> owning leaves for the (possibly sliced) network.
struct Structure {
    std::vector<IndexSet> sets;
    std::vector<std::array<int, 2>> owners;
};

Structure structure(const TensorNetwork &tn, const IndexSet &sliced) {
    Structure s;
    s.sets.reserve(tn.tensors.size());
    s.owners.assign(tn.n_indices, {-1, -1});
    for (size_t i = 0; i < tn.tensors.size(); ++i) {
        s.sets.push_back(without(tn.tensors[i].indices, sliced));
        for (int x : s.sets.back()) {
            auto &o = s.owners[x];
            (o[0] < 0 ? o[0] : o[1]) = static_cast<int>(i);
        }
    }
    return s;
}

struct PartitionParams {
    double imbalance = 0.1;
    int cutoff = 8;
    int restarts = 4;
    GreedyParams greedy;
};

// Balanced min-cut bisection by randomized BFS growth and Fiduccia-Mattheyses passes.
std::vector<char> bisect(const std::vector<std::vector<std::pair<int, int>>> &adj, double imbalance, Rng &rng) {
    const int m = static_cast<int>(adj.size());
    int lo = std::max(1, static_cast<int>(std::floor(m * (0.5 - imbalance))));
    int hi = std::min(m - 1, static_cast<int>(std::ceil(m * (0.5 + imbalance))));
    std::vector<char> side(m, 1);
    int target = m / 2;
    int size0 = 0;
    std::vector<char> seen(m, 0);
    std::vector<int> frontier;
    std::uniform_int_distribution<int> any(0, m - 1);
    while (size0 < target) {
        if (frontier.empty()) {
            int v;
            do v = any(rng);
            while (side[v] == 0);
            frontier.push_back(v);
            seen[v] = 1;
        }
        std::uniform_int_distribution<size_t> pick(0, frontier.size() - 1);
        size_t k = pick(rng);
        int v = frontier[k];
        frontier[k] = frontier.back();
        frontier.pop_back();
        side[v] = 0;
        ++size0;
        for (auto [u, w] : adj[v])
            if (!seen[u]) {
                seen[u] = 1;
                frontier.push_back(u);
            }
    }
    std::vector<int> gain(m);
    for (int pass = 0; pass < 6; ++pass) {
        for (int v = 0; v < m; ++v) {
            gain[v] = 0;
            for (auto [u, w] : adj[v]) gain[v] += side[u] != side[v] ? w : -w;
        }
        std::vector<char> locked(m, 0);
        std::vector<int> moves;
        int cum = 0, best = 0;
        size_t best_len = 0;
        int s0 = size0;
        for (int step = 0; step < m; ++step) {
            int pick_v = -1;
            for (int v = 0; v < m; ++v) {
                if (locked[v]) continue;
                int ns0 = s0 + (side[v] == 0 ? -1 : 1);
                if (ns0 < lo || ns0 > hi) continue;
                if (pick_v < 0 || gain[v] > gain[pick_v]) pick_v = v;
            }
            if (pick_v < 0) break;
            int v = pick_v;
            cum += gain[v];
            s0 += side[v] == 0 ? -1 : 1;
            side[v] ^= 1;
            locked[v] = 1;
            moves.push_back(v);
            gain[v] = -gain[v];
            for (auto [u, w] : adj[v]) gain[u] += side[u] != side[v] ? 2 * w : -2 * w;
            if (cum > best) {
                best = cum;
                best_len = moves.size();
            }
        }
        for (size_t i = moves.size(); i > best_len; --i) side[moves[i - 1]] ^= 1;
        size0 = 0;
        for (int v = 0; v < m; ++v) size0 += side[v] == 0;
        if (best <= 0) break;
    }
    return side;
}

int partition_build(Builder &b, const Structure &st, const std::vector<int> &leaves, const PartitionParams &p,
                    Rng &rng, std::vector<int> &local) {
    const int m = static_cast<int>(leaves.size());
    if (m <= std::max(2, p.cutoff)) {
        std::vector<IndexSet> sets;
        for (int l : leaves) sets.push_back(st.sets[l]);
        return greedy_combine(b, leaves, std::move(sets), p.greedy, rng);
    }
    for (int i = 0; i < m; ++i) local[leaves[i]] = i;
    std::vector<std::vector<std::pair<int, int>>> adj(m);
    for (int i = 0; i < m; ++i)
        for (int x : st.sets[leaves[i]]) {
            const auto &o = st.owners[x];
            int other = o[0] == leaves[i] ? o[1] : o[0];
            if (other < 0 || local[other] < 0) continue;
            int j = local[other];
            if (j <= i) continue;
            adj[i].push_back({j, 1});
            adj[j].push_back({i, 1});
        }
    std::vector<char> side;
    int best_cut = -1;
    for (int attempt = 0; attempt < p.restarts; ++attempt) {
        auto trial = bisect(adj, p.imbalance, rng);
        int cut = 0;
        for (int i = 0; i < m; ++i)
            for (auto [j, w] : adj[i]) cut += trial[i] != trial[j] ? w : 0;
        if (best_cut < 0 || cut < best_cut) {
            best_cut = cut;
            side = std::move(trial);
        }
    }
    for (int l : leaves) local[l] = -1;
    std::vector<int> part[2];
    for (int i = 0; i < m; ++i) part[side[i] ? 1 : 0].push_back(leaves[i]);
    int r0 = partition_build(b, st, part[0], p, rng, local);
    int r1 = partition_build(b, st, part[1], p, rng, local);
    return b.merge(r0, r1);
}

// Mutable tree with per-node index sets and merge costs.
struct Nodes {
    int n = 0;
    int root = 0;
    std::vector<std::array<int, 2>> ch;
    std::vector<IndexSet> sets;
    std::vector<double> cost;

    Nodes(const Structure &st, const ContractionTree &tree) : n(tree.n_leaves), root(tree.root()) {
        const int total = 2 * n - 1;
        ch.assign(total, {-1, -1});
        sets.resize(total);
        cost.assign(total, 0.0);
        for (int i = 0; i < n; ++i) sets[i] = st.sets[i];
        for (int k = 0; k < n - 1; ++k) {
            int v = n + k;
            ch[v] = tree.merges[k];
            sets[v] = sym_diff(sets[ch[v][0]], sets[ch[v][1]]);
            cost[v] = 8.0 * std::exp2(union_size(sets[ch[v][0]], sets[ch[v][1]]));
        }
    }

    double total_cost() const {
        double f = 0;
        for (size_t v = n; v < ch.size(); ++v) f += cost[v];
        return f;
    }

    // renumbers internal nodes in post order
    ContractionTree emit() const {
        Builder b;
        b.n = n;
        std::vector<int> newid(ch.size(), -1);
        for (int i = 0; i < n; ++i) newid[i] = i;
        std::vector<std::pair<int, bool>> stack{{root, false}};
        while (!stack.empty()) {
            auto [v, done] = stack.back();
            stack.pop_back();
            if (v < n) continue;
            if (done) {
                newid[v] = b.merge(newid[ch[v][0]], newid[ch[v][1]]);
                continue;
            }
            stack.push_back({v, true});
            stack.push_back({ch[v][1], false});
            stack.push_back({ch[v][0], false});
        }
        return b.tree();
    }
};

// Metropolis over subtree rotations on log2(total FLOPs); temperature decays by 0.98 per sweep.
ContractionTree anneal(const Structure &st, const ContractionTree &tree, int sweeps, Rng &rng) {
    const int n = tree.n_leaves;
    if (n < 3) return tree;
    Nodes t(st, tree);
    const int total = 2 * n - 1;
    double f = t.total_cost();
    std::uniform_int_distribution<int> pick(n, total - 1);
    std::uniform_real_distribution<double> u01;
    double temp = 0.1;
    for (int sweep = 0; sweep < sweeps; ++sweep, temp *= 0.98) {
        for (int move = 0; move < n; ++move) {
            int p = pick(rng);
            int c = u01(rng) < 0.5 ? 0 : 1;
            int a = t.ch[p][c], bb = t.ch[p][1 - c];
            if (a < n) continue;
            int g = u01(rng) < 0.5 ? 0 : 1;
            int keep = t.ch[a][g], moved = t.ch[a][1 - g];
            IndexSet na = sym_diff(t.sets[moved], t.sets[bb]);
            double ca = 8.0 * std::exp2(union_size(t.sets[moved], t.sets[bb]));
            double cp = 8.0 * std::exp2(union_size(t.sets[keep], na));
            double nf = f - t.cost[a] - t.cost[p] + ca + cp;
            double dlog = std::log2(std::max(nf, 1.0)) - std::log2(std::max(f, 1.0));
            if (dlog > 0 && u01(rng) >= std::exp(-dlog / temp)) continue;
            t.sets[a] = std::move(na);
            t.cost[a] = ca;
            t.cost[p] = cp;
            t.ch[a] = {moved, bb};
            t.ch[p] = {keep, a};
            f = nf;
        }
        f = t.total_cost();
    }
    return t.emit();
}

// Replaces subtrees of up to `k` inputs by their optimal contraction (dynamic programming
// over subsets), visiting the most expensive nodes first.
ContractionTree reconfigure(const Structure &st, const ContractionTree &tree, int k, int passes) {
    const int n = tree.n_leaves;
    if (n < 3) return tree;
    Nodes t(st, tree);
    using Bits = std::bitset<256>;
    for (int pass = 0; pass < passes; ++pass) {
        bool improved = false;
        std::vector<int> order;
        double top = 0;
        for (int v = n; v < 2 * n - 1; ++v) top = std::max(top, t.cost[v]);
        for (int v = n; v < 2 * n - 1; ++v)
            if (t.cost[v] >= top * 1e-4) order.push_back(v);
        std::sort(order.begin(), order.end(), [&](int a, int b) { return t.cost[a] > t.cost[b]; });
        for (int v : order) {
            // expand the region below v
            std::vector<int> inputs{t.ch[v][0], t.ch[v][1]}, inner{v};
            while (static_cast<int>(inputs.size()) < k) {
                int best = -1;
                for (int i = 0; i < static_cast<int>(inputs.size()); ++i)
                    if (inputs[i] >= n && (best < 0 || t.cost[inputs[i]] > t.cost[inputs[best]])) best = i;
                if (best < 0) break;
                int u = inputs[best];
                inner.push_back(u);
                inputs[best] = t.ch[u][0];
                inputs.push_back(t.ch[u][1]);
            }
            const int m = static_cast<int>(inputs.size());
            if (m < 3) continue;
            double old = 0;
            for (int u : inner) old += t.cost[u];
            std::unordered_map<int, int> local;
            for (int u : inputs)
                for (int x : t.sets[u]) local.emplace(x, static_cast<int>(local.size()));
            if (local.size() > 256) continue;
            const int full = (1 << m) - 1;
            std::vector<Bits> idx(full + 1);
            for (int i = 0; i < m; ++i)
                for (int x : t.sets[inputs[i]]) idx[1 << i].set(local[x]);
            for (int mask = 1; mask <= full; ++mask) {
                int low = mask & -mask;
                if (mask != low) idx[mask] = idx[mask ^ low] ^ idx[low];
            }
            std::vector<double> best(full + 1, 0.0);
            std::vector<int> split(full + 1, 0);
            for (int mask = 1; mask <= full; ++mask) {
                if ((mask & (mask - 1)) == 0) continue;
                int low = mask & -mask;
                double b = INFINITY;
                for (int sub = (mask - 1) & mask; sub > 0; sub = (sub - 1) & mask) {
                    if (!(sub & low)) continue;
                    int rest = mask ^ sub;
                    double c = best[sub] + best[rest] + 8.0 * std::exp2((idx[sub] | idx[rest]).count());
                    if (c < b) {
                        b = c;
                        split[mask] = sub;
                    }
                }
                best[mask] = b;
            }
            if (!(best[full] < old * (1 - 1e-12))) continue;
            improved = true;
            // rebuild with the inner node ids, v stays on top
            size_t next = 0;
            std::vector<int> pool(inner.begin(), inner.end());
            auto build = [&](auto &&self, int mask) -> int {
                if ((mask & (mask - 1)) == 0) return inputs[__builtin_ctz(mask)];
                int id = pool[next++];
                int a = self(self, split[mask]);
                int b = self(self, mask ^ split[mask]);
                t.ch[id] = {a, b};
                t.sets[id] = sym_diff(t.sets[a], t.sets[b]);
                t.cost[id] = 8.0 * std::exp2(union_size(t.sets[a], t.sets[b]));
                return id;
            };
            build(build, full);
        }
        if (!improved) break;
    }
    return t.emit();
}

// Unit = the tensors of one gate (or one bare qubit), merged before absorption.
std::vector<std::vector<int>> gate_units(const TensorNetwork &tn, std::vector<int> &bare) {
    std::vector<std::vector<int>> units(tn.gate_qubits.size());
    for (int i = 0; i < static_cast<int>(tn.tensors.size()); ++i) {
        if (tn.tensors[i].gate >= 0)
            units[tn.tensors[i].gate].push_back(i);
        else
            bare.push_back(i);
    }
    return units;
}

ContractionTree sequence_tree(const TensorNetwork &tn, const std::vector<std::vector<int>> &order) {
    Builder b;
    b.n = static_cast<int>(tn.tensors.size());
    int running = -1;
    for (const auto &unit : order) {
        if (unit.empty()) continue;
        int u = unit[0];
        for (size_t i = 1; i < unit.size(); ++i) u = b.merge(u, unit[i]);
        running = running < 0 ? u : b.merge(running, u);
    }
    auto t = b.tree();
    finalize_tree(tn, t);
    return t;
}

bool better(const ContractionTree &a, const ContractionTree &b) {
    if (a.log2_flops != b.log2_flops) return a.log2_flops < b.log2_flops;
    return a.max_rank < b.max_rank;
}

} // namespace

ContractionTree statevector_order(const TensorNetwork &tn) {
    if (tn.tensors.empty()) throw DomainError("empty network");
    std::vector<int> bare;
    auto units = gate_units(tn, bare);
    for (int t : bare) units.push_back({t});
    return sequence_tree(tn, units);
}

ContractionTree light_cone_order(const TensorNetwork &tn, const std::vector<std::pair<int, int>> &pairing) {
    if (tn.tensors.empty()) throw DomainError("empty network");
    std::vector<int> bare;
    auto units = gate_units(tn, bare);
    const int ng = static_cast<int>(tn.gate_qubits.size());
    std::vector<std::pair<int, int>> pairs = pairing;
    if (pairs.empty() && ng > 0) {
        int last = tn.gate_layer.back();
        for (int g = 0; g < ng; ++g)
            if (tn.gate_layer[g] == last) pairs.push_back({tn.gate_qubits[g][0], tn.gate_qubits[g][1]});
    }
    std::vector<char> done(ng, 0), input_used(tn.n_qubits, 0);
    // gates in the past cone of `out` that are not yet contracted
    auto cone = [&](const std::vector<int> &out) {
        std::vector<char> live(tn.n_qubits, 0);
        for (int q : out) live[q] = 1;
        std::vector<int> gates;
        for (int g = ng - 1; g >= 0; --g) {
            auto [a, c] = tn.gate_qubits[g];
            if (!live[a] && !live[c]) continue;
            live[a] = live[c] = 1;
            if (!done[g]) gates.push_back(g);
        }
        std::reverse(gates.begin(), gates.end());
        return gates;
    };
    std::vector<std::vector<int>> order;
    std::vector<char> pair_used(pairs.size(), 0);
    const bool greedy = pairing.empty();
    for (size_t stage = 0; stage < pairs.size(); ++stage) {
        size_t chosen = stage;
        std::vector<int> chosen_gates;
        if (greedy) {
            int best_new = -1;
            size_t best_gates = 0;
            for (size_t k = 0; k < pairs.size(); ++k) {
                if (pair_used[k]) continue;
                auto gs = cone({pairs[k].first, pairs[k].second});
                std::vector<char> mark(tn.n_qubits, 0);
                int fresh = 0;
                for (int g : gs)
                    for (int q : tn.gate_qubits[g])
                        if (!input_used[q] && !mark[q]) {
                            mark[q] = 1;
                            ++fresh;
                        }
                if (best_new < 0 || fresh < best_new || (fresh == best_new && gs.size() < best_gates)) {
                    best_new = fresh;
                    best_gates = gs.size();
                    chosen = k;
                    chosen_gates = std::move(gs);
                }
            }
        } else {
            chosen_gates = cone({pairs[chosen].first, pairs[chosen].second});
        }
        pair_used[chosen] = 1;
        for (int g : chosen_gates) {
            done[g] = 1;
            input_used[tn.gate_qubits[g][0]] = input_used[tn.gate_qubits[g][1]] = 1;
            order.push_back(units[g]);
        }
    }
    for (int g = 0; g < ng; ++g)
        if (!done[g]) order.push_back(units[g]);
    for (int t : bare) order.push_back({t});
    return sequence_tree(tn, order);
}

namespace {

ContractionTree run_trial(const TensorNetwork &tn, const Structure &st, OrderMethod method, int sweeps,
                          uint64_t seed, int trial) {
    Rng rng(seed);
    std::uniform_real_distribution<double> u01;
    Builder b;
    b.n = static_cast<int>(tn.tensors.size());
    std::vector<int> all(b.n);
    std::iota(all.begin(), all.end(), 0);
    if (method == OrderMethod::Greedy) {
        GreedyParams gp;
        if (trial > 0) {
            gp.alpha = 0.5 + u01(rng);
            gp.temperature = u01(rng);
        }
        greedy_combine(b, all, st.sets, gp, rng);
    } else {
        PartitionParams pp;
        pp.imbalance = 0.02 + 0.4 * u01(rng);
        pp.cutoff = 2 + static_cast<int>(u01(rng) * 14);
        pp.greedy.temperature = 0.5 * u01(rng);
        std::vector<int> local(b.n, -1);
        partition_build(b, st, all, pp, rng, local);
    }
    auto t = reconfigure(st, b.tree(), 8, 4);
    if (method == OrderMethod::Annealed) {
        auto a = anneal(st, t, sweeps, rng);
        finalize_tree(tn, a);
        finalize_tree(tn, t);
        if (better(a, t)) t = a;
    }
    t.sliced = {};
    return t;
}

} // namespace

ContractionTree optimize_order(const TensorNetwork &tn, const OptimizerBudget &budget, OrderMethod method,
                               uint64_t seed) {
    auto best = statevector_order(tn);
    if (!tn.gate_qubits.empty()) {
        auto lc = light_cone_order(tn);
        if (better(lc, best)) best = lc;
    }
    if (tn.tensors.size() < 2) return best;
    Structure st = structure(tn, {});
    const int trials = std::max(0, budget.trials);
    std::vector<ContractionTree> found(trials);
    parallel_for(trials, [&](size_t t) {
        found[t] = run_trial(tn, st, method, budget.anneal_sweeps, derive_seed(seed, t), static_cast<int>(t));
        finalize_tree(tn, found[t]);
    });
    for (const auto &t : found)
        if (better(t, best)) best = t;
    return best;
}

namespace {

TensorNetwork strip_sliced(const TensorNetwork &tn, const IndexSet &sliced) {
    TensorNetwork out;
    out.n_qubits = tn.n_qubits;
    out.n_indices = tn.n_indices;
    out.split_rank = tn.split_rank;
    out.gate_qubits = tn.gate_qubits;
    out.gate_layer = tn.gate_layer;
    out.tensors.reserve(tn.tensors.size());
    for (const auto &t : tn.tensors) {
        Tensor s;
        s.indices = without(t.indices, sliced);
        s.gate = t.gate;
        s.half = t.half;
        s.qubit = t.qubit;
        out.tensors.push_back(std::move(s));
    }
    return out;
}

} // namespace

ContractionTree slice_tree(const TensorNetwork &tn, const ContractionTree &tree, int log2_width_budget,
                           const OptimizerBudget &budget, OrderMethod method, uint64_t seed, int max_sliced) {
    if (log2_width_budget < 1) throw InfeasibleBudget("width budget must be at least 2");
    ContractionTree cur = tree;
    finalize_tree(tn, cur);
    const int n = cur.n_leaves;
    int since = 0;
    int round = 0;
    while (cur.max_rank > log2_width_budget) {
        if (static_cast<int>(cur.sliced.size()) >= max_sliced)
            throw InfeasibleBudget("width budget needs more than " + std::to_string(max_sliced) + " sliced indices");
        // node sets and unions for the current slicing
        std::vector<IndexSet> sets(n + cur.merges.size()), unions(cur.merges.size());
        for (int i = 0; i < n; ++i) sets[i] = without(tn.tensors[i].indices, cur.sliced);
        for (size_t k = 0; k < cur.merges.size(); ++k) {
            const auto &a = sets[cur.merges[k][0]], &b = sets[cur.merges[k][1]];
            sets[n + k] = sym_diff(a, b);
            std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(unions[k]));
        }
        IndexSet cand;
        for (const auto &s : sets)
            if (static_cast<int>(s.size()) == cur.max_rank) cand.insert(cand.end(), s.begin(), s.end());
        std::sort(cand.begin(), cand.end());
        cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
        int best_idx = -1;
        std::tuple<int, int, double> best_key{0, 0, 0.0};
        for (int x : cand) {
            int mr = 0, at_max = 0;
            for (const auto &s : sets) {
                int r = static_cast<int>(s.size()) - (std::binary_search(s.begin(), s.end(), x) ? 1 : 0);
                if (r > mr) {
                    mr = r;
                    at_max = 0;
                }
                at_max += r == mr;
            }
            double f = 0;
            for (const auto &u : unions) {
                int r = static_cast<int>(u.size()) - (std::binary_search(u.begin(), u.end(), x) ? 1 : 0);
                f += std::exp2(r);
            }
            std::tuple<int, int, double> key{mr, at_max, f};
            if (best_idx < 0 || key < best_key) {
                best_key = key;
                best_idx = x;
            }
        }
        cur.sliced.insert(std::lower_bound(cur.sliced.begin(), cur.sliced.end(), best_idx), best_idx);
        finalize_tree(tn, cur);
        if (++since == 4 && cur.max_rank > log2_width_budget) {
            since = 0;
            auto stripped = strip_sliced(tn, cur.sliced);
            auto re = optimize_order(stripped, budget, method, derive_seed(seed, round++));
            re.sliced = cur.sliced;
            finalize_tree(tn, re);
            if (re.max_rank <= cur.max_rank && re.log2_flops < cur.log2_flops) cur = re;
        }
    }
    return cur;
}

} // namespace rcsw
