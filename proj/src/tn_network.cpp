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

#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/Dense>

#include "json.hpp"

namespace rcsw {

namespace {

// One appearance of a qubit in a 2Q tensor, in time order.
struct Event {
    int tensor;
    int slot; // which qubit side of the tensor (0 or 1)
    Mat2 before = Mat2::Identity(); // 1Q gates since the previous event
};

// Per qubit side of a tensor: absorbed boundary or explicit wire leg.
struct Side {
    int in_index = -1;
    int out_index = -1;
    Eigen::Matrix2cd lin;  // lin(a, w): internal input a from leg value w (column 0 if absorbed)
    Eigen::Matrix2cd rout; // rout(a, w): internal output a to leg value w (column 0 if absorbed)
};

Tensor build_tensor(const std::vector<int> &legs, const std::function<cplx(const std::vector<int> &)> &value) {
    Tensor t;
    std::vector<int> order(legs.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return legs[a] < legs[b]; });
    for (int i : order) t.indices.push_back(legs[i]);
    const size_t size = size_t{1} << legs.size();
    t.data.resize(size);
    std::vector<int> vals(legs.size());
    for (size_t off = 0; off < size; ++off) {
        for (size_t b = 0; b < order.size(); ++b) vals[order[b]] = (off >> b) & 1;
        t.data[off] = value(vals);
    }
    return t;
}

} // namespace

TensorNetwork circuit_to_tn(const Circuit &c, uint64_t out_bits, int split_rank) {
    if (split_rank != 2 && split_rank != 4) throw DomainError("split_rank must be 2 or 4");
    const int n = c.n;
    TensorNetwork tn;
    tn.n_qubits = n;
    tn.split_rank = split_rank;
    std::vector<Mat2> pending(n, Mat2::Identity());
    std::vector<std::vector<Event>> events(n);
    std::vector<double> theta;
    std::vector<int> bond;
    int layer2 = 0;
    int next_index = 0;
    int n_tensors = 0;
    for (const auto &l : c.layers) {
        for (const auto &g : l.one) pending[g.q] = gate_matrix(g) * pending[g.q];
        if (l.type != Layer::Type::TwoQ) continue;
        for (const auto &g : l.two) {
            int id = static_cast<int>(theta.size());
            theta.push_back(g.theta);
            tn.gate_qubits.push_back({g.q0, g.q1});
            tn.gate_layer.push_back(layer2);
            int qs[2] = {g.q0, g.q1};
            if (split_rank == 2) {
                bond.push_back(next_index++);
                for (int s = 0; s < 2; ++s) {
                    events[qs[s]].push_back({n_tensors, 0, pending[qs[s]]});
                    pending[qs[s]] = Mat2::Identity();
                    ++n_tensors;
                }
                (void)id;
            } else {
                for (int s = 0; s < 2; ++s) {
                    events[qs[s]].push_back({n_tensors, s, pending[qs[s]]});
                    pending[qs[s]] = Mat2::Identity();
                }
                ++n_tensors;
            }
        }
        ++layer2;
    }
    // sides[tensor][slot]
    std::vector<std::array<Side, 2>> sides(n_tensors);
    for (int q = 0; q < n; ++q) {
        const auto &ev = events[q];
        int xq = static_cast<int>((out_bits >> q) & 1);
        for (size_t k = 0; k < ev.size(); ++k) {
            Side &s = sides[ev[k].tensor][ev[k].slot];
            s.lin.setZero();
            s.rout.setZero();
            if (k == 0) {
                s.lin.col(0) = ev[k].before.col(0);
            } else {
                s.in_index = sides[ev[k - 1].tensor][ev[k - 1].slot].out_index;
                s.lin = ev[k].before;
            }
            if (k + 1 == ev.size()) {
                s.rout.col(0) = pending[q].row(xq).transpose();
            } else {
                s.out_index = next_index++;
                s.rout = Eigen::Matrix2cd::Identity();
            }
        }
    }
    tn.tensors.reserve(n_tensors + n);
    if (split_rank == 2) {
        for (int g = 0; g < static_cast<int>(theta.size()); ++g) {
            for (int h = 0; h < 2; ++h) {
                const Side &s = sides[2 * g + h][0];
                std::vector<int> legs{bond[g]};
                if (s.in_index >= 0) legs.push_back(s.in_index);
                if (s.out_index >= 0) legs.push_back(s.out_index);
                const double th = theta[g];
                Tensor t = build_tensor(legs, [&](const std::vector<int> &v) {
                    int sb = v[0];
                    int w_in = s.in_index >= 0 ? v[1] : 0;
                    int w_out = s.out_index >= 0 ? v.back() : 0;
                    cplx acc = 0;
                    for (int a = 0; a < 2; ++a) {
                        cplx core = h == 0 ? cplx(a == sb ? 1.0 : 0.0)
                                           : std::exp(cplx(0, -th / 2 * (((sb ^ a) & 1) ? -1.0 : 1.0)));
                        acc += s.lin(a, w_in) * core * s.rout(a, w_out);
                    }
                    return acc;
                });
                t.gate = g;
                t.half = h;
                t.qubit = tn.gate_qubits[g][h];
                tn.tensors.push_back(std::move(t));
            }
        }
    } else {
        for (int g = 0; g < static_cast<int>(theta.size()); ++g) {
            const auto &sd = sides[g];
            std::vector<int> legs;
            std::array<int, 4> pos{-1, -1, -1, -1}; // in0, out0, in1, out1
            for (int s = 0; s < 2; ++s) {
                if (sd[s].in_index >= 0) {
                    pos[2 * s] = static_cast<int>(legs.size());
                    legs.push_back(sd[s].in_index);
                }
                if (sd[s].out_index >= 0) {
                    pos[2 * s + 1] = static_cast<int>(legs.size());
                    legs.push_back(sd[s].out_index);
                }
            }
            const double th = theta[g];
            Tensor t = build_tensor(legs, [&](const std::vector<int> &v) {
                auto leg = [&](int p) { return p >= 0 ? v[p] : 0; };
                cplx acc = 0;
                for (int a0 = 0; a0 < 2; ++a0)
                    for (int a1 = 0; a1 < 2; ++a1) {
                        cplx core = std::exp(cplx(0, -th / 2 * (((a0 ^ a1) & 1) ? -1.0 : 1.0)));
                        acc += sd[0].lin(a0, leg(pos[0])) * sd[0].rout(a0, leg(pos[1])) * sd[1].lin(a1, leg(pos[2])) *
                               sd[1].rout(a1, leg(pos[3])) * core;
                    }
                return acc;
            });
            t.gate = g;
            tn.tensors.push_back(std::move(t));
        }
    }
    for (int q = 0; q < n; ++q) {
        if (!events[q].empty()) continue;
        Tensor t;
        t.qubit = q;
        t.data = {pending[q](static_cast<int>((out_bits >> q) & 1), 0)};
        tn.tensors.push_back(std::move(t));
    }
    tn.n_indices = next_index;
    return tn;
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

// log2(2^a + 2^b) without overflow
double log2_add(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == -INFINITY) return a;
    return a + std::log2(1.0 + std::exp2(b - a));
}

} // namespace

bool is_valid_tree(const ContractionTree &tree) {
    const int n = tree.n_leaves;
    if (n <= 0) return false;
    if (static_cast<int>(tree.merges.size()) != n - 1) return false;
    std::vector<char> used(2 * n - 1, 0);
    for (size_t k = 0; k < tree.merges.size(); ++k) {
        for (int c : tree.merges[k]) {
            if (c < 0 || c >= n + static_cast<int>(k) || used[c]) return false;
            used[c] = 1;
        }
    }
    return true;
}

TreeStats tree_stats(const TensorNetwork &tn, const ContractionTree &tree) {
    const int n = tree.n_leaves;
    if (n != static_cast<int>(tn.tensors.size()) || !is_valid_tree(tree)) throw DomainError("tree does not match network");
    std::vector<IndexSet> sets(n + tree.merges.size());
    TreeStats st;
    for (int i = 0; i < n; ++i) {
        sets[i] = without(tn.tensors[i].indices, tree.sliced);
        st.max_rank = std::max(st.max_rank, static_cast<int>(sets[i].size()));
    }
    double lf = -INFINITY;
    for (size_t k = 0; k < tree.merges.size(); ++k) {
        const auto &a = sets[tree.merges[k][0]], &b = sets[tree.merges[k][1]];
        lf = log2_add(lf, 3.0 + union_size(a, b));
        sets[n + k] = sym_diff(a, b);
        int r = static_cast<int>(sets[n + k].size());
        st.max_rank = std::max(st.max_rank, r);
        st.max_internal_rank = std::max(st.max_internal_rank, r);
    }
    st.log2_flops = tree.merges.empty() ? 0.0 : lf + static_cast<double>(tree.sliced.size());
    return st;
}

void finalize_tree(const TensorNetwork &tn, ContractionTree &tree) {
    auto st = tree_stats(tn, tree);
    tree.log2_flops = st.log2_flops;
    tree.max_rank = st.max_rank;
}

std::string ContractionTree::to_json() const {
    nlohmann::json j;
    j["n_leaves"] = n_leaves;
    j["merges"] = merges;
    j["sliced"] = sliced;
    j["log2_flops"] = log2_flops;
    j["max_rank"] = max_rank;
    return j.dump();
}

namespace {

struct Dense {
    IndexSet idx;
    std::vector<cplx> data;
};

// Offsets of every assignment of `sub` inside a tensor laid out over `full`.
std::vector<size_t> offsets(const IndexSet &sub, const IndexSet &full) {
    std::vector<int> pos;
    for (int i : sub) pos.push_back(static_cast<int>(std::lower_bound(full.begin(), full.end(), i) - full.begin()));
    std::vector<size_t> off(size_t{1} << sub.size(), 0);
    for (size_t v = 1; v < off.size(); ++v) {
        int low = __builtin_ctzll(v);
        off[v] = off[v & (v - 1)] | (size_t{1} << pos[low]);
    }
    return off;
}

Dense contract(const Dense &a, const Dense &b, size_t max_elements) {
    IndexSet shared, fa, fb, out;
    std::set_intersection(a.idx.begin(), a.idx.end(), b.idx.begin(), b.idx.end(), std::back_inserter(shared));
    std::set_difference(a.idx.begin(), a.idx.end(), b.idx.begin(), b.idx.end(), std::back_inserter(fa));
    std::set_difference(b.idx.begin(), b.idx.end(), a.idx.begin(), a.idx.end(), std::back_inserter(fb));
    std::set_union(fa.begin(), fa.end(), fb.begin(), fb.end(), std::back_inserter(out));
    if (out.size() >= 63 || (size_t{1} << out.size()) > max_elements) throw CapacityError("intermediate tensor too large");
    auto a_free = offsets(fa, a.idx), a_sh = offsets(shared, a.idx);
    auto b_free = offsets(fb, b.idx), b_sh = offsets(shared, b.idx);
    auto r_a = offsets(fa, out), r_b = offsets(fb, out);
    Eigen::MatrixXcd am(a_free.size(), a_sh.size()), bm(b_sh.size(), b_free.size());
    for (size_t i = 0; i < a_free.size(); ++i)
        for (size_t s = 0; s < a_sh.size(); ++s) am(i, s) = a.data[a_free[i] + a_sh[s]];
    for (size_t s = 0; s < b_sh.size(); ++s)
        for (size_t j = 0; j < b_free.size(); ++j) bm(s, j) = b.data[b_free[j] + b_sh[s]];
    Eigen::MatrixXcd cm = am * bm;
    Dense r;
    r.idx = std::move(out);
    r.data.resize(size_t{1} << r.idx.size());
    for (size_t i = 0; i < r_a.size(); ++i)
        for (size_t j = 0; j < r_b.size(); ++j) r.data[r_a[i] + r_b[j]] = cm(i, j);
    return r;
}

// Restricts a tensor to fixed values of the sliced indices.
Dense restrict_tensor(const Tensor &t, const IndexSet &sliced, uint64_t assignment) {
    Dense d;
    size_t base = 0;
    for (size_t b = 0; b < t.indices.size(); ++b) {
        auto it = std::lower_bound(sliced.begin(), sliced.end(), t.indices[b]);
        if (it != sliced.end() && *it == t.indices[b]) {
            if ((assignment >> (it - sliced.begin())) & 1) base |= size_t{1} << b;
        } else {
            d.idx.push_back(t.indices[b]);
        }
    }
    auto off = offsets(d.idx, t.indices);
    d.data.resize(off.size());
    for (size_t v = 0; v < off.size(); ++v) d.data[v] = t.data[base + off[v]];
    return d;
}

} // namespace

cplx execute_tree(const TensorNetwork &tn, const ContractionTree &tree, size_t max_elements) {
    const int n = tree.n_leaves;
    if (n != static_cast<int>(tn.tensors.size()) || !is_valid_tree(tree)) throw DomainError("tree does not match network");
    for (const auto &t : tn.tensors)
        if (t.data.size() != (size_t{1} << t.indices.size())) throw DomainError("network has no tensor data");
    if (tree.sliced.size() >= 40) throw CapacityError("too many sliced indices to execute");
    cplx total = 0;
    const uint64_t slices = uint64_t{1} << tree.sliced.size();
    for (uint64_t s = 0; s < slices; ++s) {
        std::vector<Dense> nodes(n + tree.merges.size());
        for (int i = 0; i < n; ++i) nodes[i] = restrict_tensor(tn.tensors[i], tree.sliced, s);
        for (size_t k = 0; k < tree.merges.size(); ++k) {
            auto &a = nodes[tree.merges[k][0]];
            auto &b = nodes[tree.merges[k][1]];
            nodes[n + k] = contract(a, b, max_elements);
            a = Dense{};
            b = Dense{};
        }
        const Dense &root = nodes[tree.root()];
        if (!root.idx.empty()) throw DomainError("network is not closed");
        total += root.data[0];
    }
    return total;
}

} // namespace rcsw
