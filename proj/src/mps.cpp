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

#include "rcsw/mps.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <Eigen/Dense>

#include "rcsw/bootstrap.hpp"
#include "rcsw/estimators.hpp"
#include "rcsw/graph.hpp"

namespace rcsw {

namespace {

using Mat = Eigen::MatrixXcd;
using MapMat = Eigen::Map<Mat>;
using CMapMat = Eigen::Map<const Mat>;

int site_of(const MpsState &s, int q, int *bit = nullptr) {
    for (size_t i = 0; i < s.sites.size(); ++i) {
        const auto &qs = s.sites[i].qubits;
        auto it = std::find(qs.begin(), qs.end(), q);
        if (it != qs.end()) {
            if (bit) *bit = static_cast<int>(it - qs.begin());
            return static_cast<int>(i);
        }
    }
    throw DomainError("qubit " + std::to_string(q) + " is not in the chain");
}

void store(MpsSite &site, const Mat &m, int dl, int dr) {
    site.dl = dl;
    site.dr = dr;
    site.data.assign(m.data(), m.data() + m.size());
}

void move_center(MpsState &s, int to) {
    while (s.center < to) {
        auto &a = s.sites[s.center];
        auto &b = s.sites[s.center + 1];
        CMapMat m(a.data.data(), a.dl * a.phys(), a.dr);
        Eigen::HouseholderQR<Mat> qr(m);
        const int k = static_cast<int>(std::min(m.rows(), m.cols()));
        Mat q = qr.householderQ() * Mat::Identity(m.rows(), k);
        Mat r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
        Mat nb = r * CMapMat(b.data.data(), b.dl, b.phys() * b.dr);
        s.flops += 8.0 * m.rows() * m.cols() * k * 2 + 8.0 * k * b.dl * b.phys() * b.dr;
        store(a, q, a.dl, k);
        store(b, nb, k, b.dr);
        ++s.center;
    }
    while (s.center > to) {
        auto &a = s.sites[s.center - 1];
        auto &b = s.sites[s.center];
        Mat m = CMapMat(b.data.data(), b.dl, b.phys() * b.dr).adjoint();
        Eigen::HouseholderQR<Mat> qr(m);
        const int k = static_cast<int>(std::min(m.rows(), m.cols()));
        Mat q = qr.householderQ() * Mat::Identity(m.rows(), k);
        Mat r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
        Mat na = CMapMat(a.data.data(), a.dl * a.phys(), a.dr) * r.adjoint();
        s.flops += 8.0 * m.rows() * m.cols() * k * 2 + 8.0 * a.dl * a.phys() * a.dr * k;
        Mat qa = q.adjoint();
        store(b, qa, k, b.dr);
        store(a, na, a.dl, k);
        --s.center;
    }
}

// Merges sites i and i+1 into theta with rows (l, s1) and columns (s2, r), lets `op`
// modify it (op may exchange the two physical legs), then splits back keeping chi values.
template <class Op>
void two_site(MpsState &s, int i, Op op) {
    move_center(s, s.center <= i ? i : i + 1);
    auto &a = s.sites[i];
    auto &b = s.sites[i + 1];
    const size_t elements = static_cast<size_t>(a.dl) * a.phys() * b.phys() * b.dr;
    if (elements > s.max_elements)
        throw CapacityError("two-site tensor of " + std::to_string(elements) + " elements exceeds the limit");
    Mat theta = CMapMat(a.data.data(), a.dl * a.phys(), a.dr) * CMapMat(b.data.data(), b.dl, b.phys() * b.dr);
    s.flops += 8.0 * theta.size() * a.dr;
    const int dl = a.dl, dr = b.dr;
    op(theta);
    Mat uu, vv;
    Eigen::VectorXd sv;
    {
        Eigen::BDCSVD<Mat> svd(theta, Eigen::ComputeThinU | Eigen::ComputeThinV);
        uu = svd.matrixU();
        vv = svd.matrixV();
        sv = svd.singularValues();
        // the divide-and-conquer solver occasionally loses accuracy; fall back to Jacobi
        Mat back = uu * sv.asDiagonal() * vv.adjoint();
        s.flops += 8.0 * theta.size() * sv.size();
        if ((back - theta).norm() > 1e-12 * std::max(1e-300, theta.norm())) {
            Eigen::JacobiSVD<Mat> jac(theta, Eigen::ComputeThinU | Eigen::ComputeThinV);
            uu = jac.matrixU();
            vv = jac.matrixV();
            sv = jac.singularValues();
        }
    }
    const int full = static_cast<int>(sv.size());
    const int k = std::max(1, std::min(full, s.chi));
    double total = sv.squaredNorm(), kept = sv.head(k).squaredNorm();
    double m = static_cast<double>(theta.rows()), nn = static_cast<double>(theta.cols());
    s.flops += 8.0 * 4.0 * m * nn * std::min(m, nn);
    if (k < full) {
        double discarded = (total - kept) / total;
        if (discarded > 0) {
            s.f_acc *= 1.0 - discarded;
            ++s.truncations;
        }
    }
    Mat u = uu.leftCols(k);
    Mat right = (sv.head(k) / std::sqrt(kept)).asDiagonal() * vv.leftCols(k).adjoint();
    store(a, u, dl, k);
    store(b, right, k, dr);
    s.center = i + 1;
}

void swap_sites(MpsState &s, int i) {
    const int dl = s.sites[i].dl, dr = s.sites[i + 1].dr;
    const int p1 = s.sites[i].phys(), p2 = s.sites[i + 1].phys();
    two_site(s, i, [&](Mat &theta) {
        Mat out(static_cast<Eigen::Index>(dl) * p2, static_cast<Eigen::Index>(p1) * dr);
        for (int r = 0; r < dr; ++r)
            for (int s2 = 0; s2 < p2; ++s2)
                for (int s1 = 0; s1 < p1; ++s1)
                    for (int l = 0; l < dl; ++l) out(l + dl * s2, s1 + p1 * r) = theta(l + dl * s1, s2 + p2 * r);
        theta = std::move(out);
    });
    std::swap(s.sites[i].qubits, s.sites[i + 1].qubits);
}

cplx uzz_phase(bool differ, double theta) { return std::exp(cplx(0, differ ? theta / 2 : -theta / 2)); }

} // namespace

MpsState MpsState::product(const std::vector<std::vector<int>> &blocks, uint64_t bits, int chi) {
    if (chi < 1) throw DomainError("chi must be at least 1");
    MpsState s;
    s.chi = chi;
    for (const auto &qs : blocks) {
        if (qs.empty()) throw DomainError("empty block");
        if (qs.size() > 20) throw CapacityError("block of " + std::to_string(qs.size()) + " qubits is too large");
        MpsSite site;
        site.qubits = qs;
        site.data.assign(site.phys(), 0.0);
        int local = 0;
        for (size_t k = 0; k < qs.size(); ++k) local |= static_cast<int>((bits >> qs[k]) & 1) << k;
        site.data[local] = 1.0;
        s.n += static_cast<int>(qs.size());
        s.sites.push_back(std::move(site));
    }
    return s;
}

int MpsState::max_bond() const {
    int m = 1;
    for (const auto &st : sites) m = std::max(m, st.dr);
    return m;
}

StateVector MpsState::to_statevector() const {
    Mat acc = Mat::Ones(1, 1);
    std::vector<int> order;
    for (const auto &st : sites) {
        Mat next = acc * CMapMat(st.data.data(), st.dl, st.phys() * st.dr);
        acc = MapMat(next.data(), acc.rows() * st.phys(), st.dr);
        order.insert(order.end(), st.qubits.begin(), st.qubits.end());
    }
    StateVector sv = StateVector::zero(n);
    for (Eigen::Index y = 0; y < acc.rows(); ++y) {
        uint64_t x = 0;
        for (size_t k = 0; k < order.size(); ++k) x |= static_cast<uint64_t>((y >> k) & 1) << order[k];
        sv.amp[x] = acc(y, 0);
    }
    return sv;
}

void MpsState::restore_order(const std::vector<std::vector<int>> &blocks) {
    std::map<int, int> rank;
    for (size_t b = 0; b < blocks.size(); ++b) rank[blocks[b].front()] = static_cast<int>(b);
    bool moved = true;
    while (moved) {
        moved = false;
        for (size_t i = 0; i + 1 < sites.size(); ++i) {
            if (rank.at(sites[i].qubits.front()) > rank.at(sites[i + 1].qubits.front())) {
                swap_sites(*this, static_cast<int>(i));
                moved = true;
            }
        }
    }
}

int default_mps_blocks(int n) { return std::min(n, std::max(2, (n + 5) / 6)); }

std::vector<std::vector<int>> mps_blocks(const Circuit &c, int n_blocks, uint64_t seed) {
    if (n_blocks < 1 || n_blocks > c.n) throw DomainError("block count must be in [1, N]");
    RegularGraph g;
    if (c.graph) {
        g = c.graph->graph;
    } else {
        std::set<Edge> edges;
        for (const auto &l : c.layers)
            for (const auto &gt : l.two) edges.insert({std::min(gt.q0, gt.q1), std::max(gt.q0, gt.q1)});
        g.n = c.n;
        g.edges.assign(edges.begin(), edges.end());
    }
    auto assign = partition_blocks(g, n_blocks, seed);
    std::vector<std::vector<int>> blocks(n_blocks);
    for (int q = 0; q < c.n; ++q) blocks[assign[q]].push_back(q);
    blocks.erase(std::remove_if(blocks.begin(), blocks.end(), [](const auto &b) { return b.empty(); }), blocks.end());
    return blocks;
}

void mps_apply_1q(MpsState &s, int q, const Mat2 &m) {
    int k;
    auto &site = s.sites[site_of(s, q, &k)];
    const int p = site.phys(), bit = 1 << k;
    for (int r = 0; r < site.dr; ++r)
        for (int x = 0; x < p; ++x) {
            if (x & bit) continue;
            cplx *a0 = &site.data[static_cast<size_t>(site.dl) * (x + p * r)];
            cplx *a1 = &site.data[static_cast<size_t>(site.dl) * ((x | bit) + p * r)];
            for (int l = 0; l < site.dl; ++l) {
                cplx v0 = a0[l], v1 = a1[l];
                a0[l] = m(0, 0) * v0 + m(0, 1) * v1;
                a1[l] = m(1, 0) * v0 + m(1, 1) * v1;
            }
        }
    s.flops += 8.0 * 4 * site.data.size();
}

void mps_apply_uzz_group(MpsState &s, const std::vector<Gate2Q> &gates) {
    if (gates.empty()) return;
    int pa = site_of(s, gates[0].q0), pb = site_of(s, gates[0].q1);
    if (pa != pb) {
        if (pb < pa) std::swap(pa, pb);
        // bring the right block next to the left one
        while (pb > pa + 1) {
            swap_sites(s, pb - 1);
            --pb;
        }
    }
    auto bit_in = [](const MpsSite &site, int q) {
        auto it = std::find(site.qubits.begin(), site.qubits.end(), q);
        return it == site.qubits.end() ? -1 : static_cast<int>(it - site.qubits.begin());
    };
    if (pa == pb) {
        auto &site = s.sites[pa];
        const int p = site.phys();
        std::vector<cplx> phase(p, 1.0);
        for (const auto &g : gates) {
            int k0 = bit_in(site, g.q0), k1 = bit_in(site, g.q1);
            if (k0 < 0 || k1 < 0) throw DomainError("gate group spans more than one block pair");
            for (int x = 0; x < p; ++x) phase[x] *= uzz_phase(((x >> k0) ^ (x >> k1)) & 1, g.theta);
        }
        for (int r = 0; r < site.dr; ++r)
            for (int x = 0; x < p; ++x)
                for (int l = 0; l < site.dl; ++l) site.data[l + site.dl * (x + static_cast<size_t>(p) * r)] *= phase[x];
        return;
    }
    const auto &a = s.sites[pa];
    const auto &b = s.sites[pa + 1];
    const int p1 = a.phys(), p2 = b.phys(), dl = a.dl;
    Mat phase = Mat::Ones(p1, p2);
    for (const auto &g : gates) {
        int ka = bit_in(a, g.q0), kb = bit_in(b, g.q1);
        if (ka < 0) {
            ka = bit_in(a, g.q1);
            kb = bit_in(b, g.q0);
        }
        if (ka < 0 || kb < 0) throw DomainError("gate group spans more than one block pair");
        for (int x1 = 0; x1 < p1; ++x1)
            for (int x2 = 0; x2 < p2; ++x2) phase(x1, x2) *= uzz_phase(((x1 >> ka) ^ (x2 >> kb)) & 1, g.theta);
    }
    two_site(s, pa, [&](Mat &theta) {
        for (Eigen::Index col = 0; col < theta.cols(); ++col)
            for (Eigen::Index row = 0; row < theta.rows(); ++row) theta(row, col) *= phase(row / dl, col % p2);
    });
}

void mps_apply_layer(MpsState &s, const Layer &l) {
    for (const auto &g : l.one) mps_apply_1q(s, g.q, gate_matrix(g));
    if (l.two.empty()) return;
    // group by unordered block pair, keyed by each block's first qubit
    std::map<int, int> owner;
    for (const auto &st : s.sites)
        for (int q : st.qubits) owner[q] = st.qubits.front();
    std::vector<std::pair<std::pair<int, int>, std::vector<Gate2Q>>> groups;
    for (const auto &g : l.two) {
        int a = owner.at(g.q0), b = owner.at(g.q1);
        std::pair<int, int> key{std::min(a, b), std::max(a, b)};
        auto it = std::find_if(groups.begin(), groups.end(), [&](const auto &e) { return e.first == key; });
        if (it == groups.end()) {
            groups.push_back({key, {g}});
        } else {
            it->second.push_back(g);
        }
    }
    for (const auto &[key, gs] : groups) mps_apply_uzz_group(s, gs);
}

double eps_from_fidelity(double f, int n_2q) {
    if (n_2q <= 0 || f >= 1.0) return 0.0;
    return 1.0 - std::pow(f, 1.0 / n_2q);
}

std::string MpsRunReport::csv_header() { return "N,d,chi,blocking,F_mps,eps_mps,flops_est,seed"; }

std::string MpsRunReport::csv_row() const {
    std::ostringstream o;
    o.precision(17);
    o << n << ',' << d << ',' << chi << ',' << blocking << ',' << f_mps << ',' << eps_mps << ',' << flops_est << ','
      << seed;
    return o.str();
}

MpsResult evolve(const Circuit &c, int chi, int n_blocks, uint64_t seed, size_t max_elements) {
    auto blocks = mps_blocks(c, n_blocks, seed);
    MpsResult out{MpsState::product(blocks, 0, chi), {}};
    out.state.max_elements = max_elements;
    for (const auto &l : c.layers) mps_apply_layer(out.state, l);
    auto &r = out.report;
    r.n = c.n;
    r.d = c.d;
    r.chi = chi;
    r.blocks = static_cast<int>(blocks.size());
    size_t lo = c.n, hi = 0;
    for (const auto &b : blocks) {
        lo = std::min(lo, b.size());
        hi = std::max(hi, b.size());
    }
    r.blocking = std::to_string(blocks.size()) + "x" + std::to_string(lo) + (lo == hi ? "" : ".." + std::to_string(hi));
    r.f_mps = out.state.f_acc;
    r.n_2q = c.num_2q();
    r.eps_mps = eps_from_fidelity(r.f_mps, r.n_2q);
    r.flops_est = out.state.flops;
    r.seed = seed;
    return out;
}

namespace {

cplx overlap(const MpsState &bra, const MpsState &ket) {
    Mat e = Mat::Ones(1, 1);
    for (size_t i = 0; i < ket.sites.size(); ++i) {
        const auto &a = ket.sites[i];
        const auto &b = bra.sites[i];
        const int p = a.phys();
        Mat next = Mat::Zero(b.dr, a.dr);
        for (int x = 0; x < p; ++x) {
            Eigen::Map<const Mat, 0, Eigen::OuterStride<>> as(a.data.data() + a.dl * x, a.dl, a.dr,
                                                               Eigen::OuterStride<>(a.dl * p));
            Eigen::Map<const Mat, 0, Eigen::OuterStride<>> bs(b.data.data() + b.dl * x, b.dl, b.dr,
                                                               Eigen::OuterStride<>(b.dl * p));
            next += bs.adjoint() * e * as;
        }
        e = std::move(next);
    }
    return e(0, 0);
}

} // namespace

SplitAmplitude split_amplitude(const Circuit &c, uint64_t x, int chi, int n_blocks, uint64_t seed) {
    auto blocks = mps_blocks(c, n_blocks, seed);
    const int half = (c.num_2q_layers() + 1) / 2;
    size_t cut = 0;
    for (int seen = 0; cut < c.layers.size() && seen < half; ++cut) seen += c.layers[cut].type == Layer::Type::TwoQ;
    auto fwd = MpsState::product(blocks, 0, chi);
    for (size_t i = 0; i < cut; ++i) mps_apply_layer(fwd, c.layers[i]);
    auto back = MpsState::product(blocks, x, chi);
    for (size_t i = c.layers.size(); i-- > cut;) {
        Layer inv = c.layers[i];
        for (auto &g : inv.two) g.theta = -g.theta;
        Layer ones;
        std::swap(ones.one, inv.one);
        inv.type = Layer::Type::TwoQ;
        mps_apply_layer(back, inv);
        for (const auto &g : ones.one) mps_apply_1q(back, g.q, gate_matrix(g).adjoint());
    }
    fwd.restore_order(blocks);
    back.restore_order(blocks);
    SplitAmplitude r;
    r.amplitude = overlap(back, fwd);
    r.f_forward = fwd.f_acc;
    r.f_backward = back.f_acc;
    r.fidelity = fwd.f_acc * back.f_acc;
    return r;
}

double bond_bound(double f_target, double purity) {
    if (!(purity > 0) || purity > 1) throw DomainError("purity must lie in (0, 1]");
    if (!(f_target >= 0)) throw DomainError("fidelity must be non-negative");
    return f_target / purity;
}

double chain_half_purity(const MpsState &s, const StateVector &exact) {
    std::vector<int> left;
    for (size_t i = 0; i < s.sites.size() / 2; ++i)
        left.insert(left.end(), s.sites[i].qubits.begin(), s.sites[i].qubits.end());
    if (left.empty()) return 1.0;
    return bipartite_purity(exact, left);
}

double topk_postprocess(const std::vector<std::vector<double>> &estimated,
                        const std::vector<std::vector<double>> &exact, int n, double alpha, size_t shots,
                        uint64_t seed) {
    if (!(alpha > 0) || alpha > 1) throw DomainError("alpha must lie in (0, 1]");
    if (estimated.size() != exact.size() || estimated.empty()) throw DomainError("need matching nonempty tables");
    const size_t dim = size_t{1} << n;
    double acc = 0;
    for (size_t c = 0; c < estimated.size(); ++c) {
        const auto &est = estimated[c];
        if (est.size() != dim || exact[c].size() != dim) throw DomainError("probability table must have 2^n entries");
        std::vector<uint64_t> idx(dim);
        std::iota(idx.begin(), idx.end(), 0);
        size_t keep = std::max<size_t>(1, static_cast<size_t>(std::ceil(alpha * dim - 1e-9)));
        std::stable_sort(idx.begin(), idx.end(), [&](uint64_t a, uint64_t b) { return est[a] > est[b]; });
        std::vector<double> w(keep);
        for (size_t i = 0; i < keep; ++i) w[i] = std::max(0.0, est[idx[i]]);
        Rng rng(derive_seed(seed, c));
        auto picks = sample_probs(w, shots, rng);
        for (auto &p : picks) p = idx[p];
        acc += xeb(picks, exact[c], n).value;
    }
    return acc / estimated.size();
}

EpsChiTable tabulate_eps_chi(const std::vector<MpsRunReport> &runs, double target_eps) {
    std::vector<int> order;
    std::map<int, std::map<int, std::vector<double>>> eps; // blocks -> chi -> values
    for (const auto &r : runs) {
        if (!eps.count(r.blocks)) order.push_back(r.blocks);
        eps[r.blocks][r.chi].push_back(r.eps_mps);
    }
    EpsChiTable t;
    for (int b : order) {
        auto &by_chi = eps[b];
        if (by_chi.size() < 2) throw DomainError("need at least two bond dimensions");
        std::vector<double> x, med;
        for (auto &[chi, v] : by_chi) {
            std::sort(v.begin(), v.end());
            EpsChiRow row{chi, b, quantile_sorted(v, 0.5), quantile_sorted(v, 0.25), quantile_sorted(v, 0.75)};
            t.rows.push_back(row);
            x.push_back(std::log2(chi));
            med.push_back(row.median);
        }
        size_t m = med.size();
        double slope = (med[m - 1] - med[m - 2]) / (x[m - 1] - x[m - 2]);
        if (slope < 0) {
            t.log2_chi_at_target.push_back(x[m - 1] + (target_eps - med[m - 1]) / slope);
        } else {
            t.log2_chi_at_target.push_back(med[m - 1] <= target_eps ? x[m - 1] : INFINITY);
        }
    }
    return t;
}

EpsChiTable epsilon_vs_chi(const std::vector<Circuit> &circuits, const std::vector<int> &chis,
                           const std::vector<int> &block_counts, double target_eps, uint64_t seed) {
    if (std::set<int>(chis.begin(), chis.end()).size() < 2) throw DomainError("need at least two bond dimensions");
    if (circuits.empty()) throw DomainError("no circuits");
    std::vector<MpsRunReport> runs;
    for (int b : block_counts) {
        for (int chi : chis) {
            std::vector<MpsRunReport> part(circuits.size());
            parallel_for(circuits.size(), [&](size_t i) {
                part[i] = evolve(circuits[i], chi, b, derive_seed(seed, i)).report;
            });
            runs.insert(runs.end(), part.begin(), part.end());
        }
    }
    return tabulate_eps_chi(runs, target_eps);
}

} // namespace rcsw
