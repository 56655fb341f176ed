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

#include "rcsw/statevector.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <regex>
#include <sstream>

namespace rcsw {

namespace {

void check_cap(int n, int cap) {
    if (n > cap) throw CapacityError("statevector of " + std::to_string(n) + " qubits exceeds cap of " +
                                     std::to_string(cap));
    if (n < 0) throw DomainError("negative qubit count");
}

} // namespace

StateVector StateVector::zero(int n, int cap) {
    check_cap(n, cap);
    StateVector sv;
    sv.n = n;
    sv.amp.assign(size_t{1} << n, cplx(0.0));
    sv.amp[0] = 1.0;
    return sv;
}

StateVector StateVector::basis(const std::vector<int> &bits, int cap) {
    StateVector sv = zero(static_cast<int>(bits.size()), cap);
    sv.amp[0] = 0.0;
    sv.amp[bits_to_index(bits)] = 1.0;
    return sv;
}

double StateVector::norm2() const {
    double s = 0;
    for (const auto &a : amp) s += std::norm(a);
    return s;
}

std::vector<double> StateVector::probabilities() const {
    std::vector<double> p(amp.size());
    for (size_t i = 0; i < amp.size(); ++i) p[i] = std::norm(amp[i]);
    return p;
}

uint64_t bits_to_index(const std::vector<int> &bits) {
    uint64_t x = 0;
    for (size_t q = 0; q < bits.size(); ++q)
        if (bits[q]) x |= uint64_t{1} << q;
    return x;
}

std::string bitstring(uint64_t x, int n) {
    std::string s(n, '0');
    for (int q = 0; q < n; ++q)
        if (x >> q & 1) s[q] = '1';
    return s;
}

void apply_1q(StateVector &sv, int q, const Mat2 &m) {
    const size_t stride = size_t{1} << q, dim = sv.amp.size();
    const cplx m00 = m(0, 0), m01 = m(0, 1), m10 = m(1, 0), m11 = m(1, 1);
    cplx *a = sv.amp.data();
    for (size_t base = 0; base < dim; base += 2 * stride) {
        for (size_t i = base; i < base + stride; ++i) {
            cplx x = a[i], y = a[i + stride];
            a[i] = m00 * x + m01 * y;
            a[i + stride] = m10 * x + m11 * y;
        }
    }
}

void apply_uzz(StateVector &sv, int q0, int q1, double theta) {
    if (theta == 0.0) return;
    const cplx same = std::polar(1.0, -theta / 2), diff = std::polar(1.0, theta / 2);
    const size_t dim = sv.amp.size();
    for (size_t i = 0; i < dim; ++i) sv.amp[i] *= ((i >> q0 ^ i >> q1) & 1) ? diff : same;
}

void apply_pauli(StateVector &sv, int q, int pauli) {
    if (pauli == 0) return;
    const size_t stride = size_t{1} << q, dim = sv.amp.size();
    cplx *a = sv.amp.data();
    const cplx I(0.0, 1.0);
    for (size_t base = 0; base < dim; base += 2 * stride) {
        for (size_t i = base; i < base + stride; ++i) {
            cplx x = a[i], y = a[i + stride];
            switch (pauli) {
            case 1: a[i] = y; a[i + stride] = x; break;
            case 2: a[i] = -I * y; a[i + stride] = I * x; break;
            default: a[i + stride] = -y;
            }
        }
    }
}

void apply_layer(StateVector &sv, const Layer &l) {
    for (const auto &g : l.one) apply_1q(sv, g.q, gate_matrix(g));
    for (const auto &g : l.two) apply_uzz(sv, g.q0, g.q1, g.theta);
}

StateVector run(const Circuit &c, int cap) { return run_from(c, StateVector::zero(c.n, cap)); }

StateVector run_from(const Circuit &c, StateVector sv) {
    if (sv.n != c.n) throw DomainError("initial state width does not match circuit");
    for (const auto &l : c.layers) apply_layer(sv, l);
    return sv;
}

std::vector<uint64_t> sample_probs(const std::vector<double> &probs, size_t shots, Rng &rng) {
    std::vector<double> cum(probs.size());
    std::partial_sum(probs.begin(), probs.end(), cum.begin());
    double total = cum.empty() ? 0.0 : cum.back();
    std::uniform_real_distribution<double> u(0.0, total);
    std::vector<uint64_t> out(shots);
    for (auto &x : out) {
        auto it = std::upper_bound(cum.begin(), cum.end(), u(rng));
        x = static_cast<uint64_t>(std::min<ptrdiff_t>(it - cum.begin(), static_cast<ptrdiff_t>(cum.size()) - 1));
    }
    return out;
}

std::vector<uint64_t> sample(const StateVector &sv, size_t shots, uint64_t seed) {
    Rng rng(derive_seed(seed, 0x73616dULL));
    return sample_probs(sv.probabilities(), shots, rng);
}

PorterThomasStats porter_thomas_stats(const StateVector &sv, int bins, double max_value) {
    PorterThomasStats st;
    const double dim = static_cast<double>(sv.amp.size());
    double s2 = 0;
    st.density.assign(bins, 0.0);
    double width = max_value / bins;
    for (int b = 0; b <= bins; ++b) st.bin_edges.push_back(b * width);
    for (const auto &a : sv.amp) {
        double p = std::norm(a);
        s2 += p * p;
        double r = dim * p;
        int b = static_cast<int>(r / width);
        if (b < bins) st.density[b] += 1.0;
    }
    for (auto &v : st.density) v /= dim * width;
    st.second_moment = dim * s2 - 1.0;
    return st;
}

double bipartite_purity(const StateVector &sv, const std::vector<int> &subset) {
    const int n = sv.n;
    std::vector<char> in(n, 0);
    for (int q : subset) {
        if (q < 0 || q >= n) throw DomainError("qubit out of range");
        in[q] = 1;
    }
    std::vector<int> a, b;
    for (int q = 0; q < n; ++q) (in[q] ? a : b).push_back(q);
    if (a.empty() || b.empty()) throw DomainError("subset must be a nonempty proper subset");
    if (a.size() > b.size()) std::swap(a, b);
    const size_t da = size_t{1} << a.size(), db = size_t{1} << b.size();
    Eigen::MatrixXcd m(da, db);
    for (size_t x = 0; x < sv.amp.size(); ++x) {
        size_t ia = 0, ib = 0;
        for (size_t k = 0; k < a.size(); ++k) ia |= ((x >> a[k]) & 1) << k;
        for (size_t k = 0; k < b.size(); ++k) ib |= ((x >> b[k]) & 1) << k;
        m(ia, ib) = sv.amp[x];
    }
    Eigen::MatrixXcd rho = m * m.adjoint();
    return rho.squaredNorm();
}

std::vector<double> apply_readout_noise(const std::vector<double> &probs, int n, double p) {
    std::vector<double> out = probs;
    if (p == 0.0) return out;
    for (int q = 0; q < n; ++q) {
        const size_t stride = size_t{1} << q;
        for (size_t base = 0; base < out.size(); base += 2 * stride) {
            for (size_t i = base; i < base + stride; ++i) {
                double x = out[i], y = out[i + stride];
                out[i] = (1 - p) * x + p * y;
                out[i + stride] = p * x + (1 - p) * y;
            }
        }
    }
    return out;
}

NoiseModel::NoiseModel() { pauli_weights.fill(1.0); }

NoiseModel NoiseModel::from_infidelities(double avg_2q, double avg_mem, double avg_1q, double spam, bool scale) {
    NoiseModel nm;
    nm.eps_2q = 1.25 * avg_2q;
    nm.eps_mem = avg_mem;
    nm.eps_1q = 1.5 * avg_1q;
    nm.p_spam = spam;
    nm.scale_by_56_over_n = scale;
    return nm;
}

double NoiseModel::mem_angle(int n) const {
    double e = std::min(eps_mem * scale(n), 2.0 / 3.0);
    return mem_sign * 2.0 * std::asin(std::sqrt(1.5 * e));
}

bool NoiseModel::is_noiseless() const { return eps_2q == 0.0 && eps_mem == 0.0 && eps_1q == 0.0 && p_spam == 0.0; }

TrajectoryResult run_trajectories(const Circuit &c, const NoiseModel &nm, int n_traj, uint64_t seed,
                                  int shots_per_traj, int cap) {
    check_cap(c.n, cap);
    if (n_traj <= 0) throw DomainError("need at least one trajectory");
    const int n = c.n;
    const double s = nm.scale(n);
    const double p2 = std::min(1.0, nm.eps_2q * s), p1 = std::min(1.0, nm.eps_1q * s);
    const double spam = std::min(0.5, nm.p_spam * s);
    const double phi = nm.mem_angle(n);
    const Mat2 mem = rz_matrix(phi);
    std::discrete_distribution<int> which(nm.pauli_weights.begin(), nm.pauli_weights.end());

    StateVector ideal = run(c, cap);
    std::vector<double> ideal_p = ideal.probabilities();
    const double dim = static_cast<double>(ideal_p.size());
    uint64_t target = c.initial_bits ? bits_to_index(*c.initial_bits) : 0;

    TrajectoryResult res;
    res.per_traj_fidelity.assign(n_traj, 0.0);
    res.per_traj_xeb.assign(n_traj, 0.0);
    res.per_traj_return.assign(n_traj, 0.0);
    res.samples.assign(n_traj, {});
    parallel_for(static_cast<size_t>(n_traj), [&](size_t t) {
        Rng rng(derive_seed(seed, t));
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::uniform_int_distribution<int> pauli1(1, 3);
        StateVector sv = StateVector::zero(n, cap);
        for (const auto &l : c.layers) {
            for (const auto &g : l.one) {
                apply_1q(sv, g.q, gate_matrix(g));
                if (p1 > 0 && u(rng) < p1) apply_pauli(sv, g.q, pauli1(rng));
            }
            if (l.type != Layer::Type::TwoQ) continue;
            for (const auto &g : l.two) {
                apply_uzz(sv, g.q0, g.q1, g.theta);
                if (p2 > 0 && g.theta != 0.0 && u(rng) < p2) {
                    int k = which(rng) + 1; // 1..15 -> (a, b) with a*4+b = k
                    apply_pauli(sv, g.q0, k / 4);
                    apply_pauli(sv, g.q1, k % 4);
                }
            }
            if (phi != 0.0)
                for (int q = 0; q < n; ++q) apply_1q(sv, q, mem);
        }
        cplx ov = 0.0;
        for (size_t x = 0; x < sv.amp.size(); ++x) ov += std::conj(ideal.amp[x]) * sv.amp[x];
        res.per_traj_fidelity[t] = std::norm(ov);
        std::vector<double> pt = apply_readout_noise(sv.probabilities(), n, spam);
        double xe = 0;
        for (size_t x = 0; x < pt.size(); ++x) xe += pt[x] * ideal_p[x];
        res.per_traj_xeb[t] = dim * xe - 1.0;
        res.per_traj_return[t] = pt[target];
        if (shots_per_traj > 0) res.samples[t] = sample_probs(pt, shots_per_traj, rng);
    });
    auto mean = [](const std::vector<double> &v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); };
    res.fidelity = mean(res.per_traj_fidelity);
    double var = 0;
    for (double f : res.per_traj_fidelity) var += (f - res.fidelity) * (f - res.fidelity);
    res.fidelity_se = n_traj > 1 ? std::sqrt(var / (n_traj - 1) / n_traj) : 0.0;
    res.xeb_mean = mean(res.per_traj_xeb);
    res.return_mean = mean(res.per_traj_return);
    return res;
}

StateVector simulate_qasm(const std::string &text, int cap) {
    static const std::regex qreg(R"(^qreg\s+\w+\[(\d+)\]$)");
    static const std::regex op1(R"(^(\w+)(?:\(([^)]*)\))?\s+\w+\[(\d+)\]$)");
    static const std::regex op2(R"(^(\w+)(?:\(([^)]*)\))?\s+\w+\[(\d+)\]\s*,\s*\w+\[(\d+)\]$)");
    StateVector sv;
    bool have_reg = false;
    std::istringstream in(text);
    std::string stmt;
    size_t offset = 0;
    auto parse_params = [&](const std::string &s) {
        std::vector<double> v;
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            size_t used = 0;
            double x = 0;
            try {
                x = std::stod(tok, &used);
            } catch (const std::exception &) {
                throw ParseError("bad parameter '" + tok + "'", "byte " + std::to_string(offset));
            }
            v.push_back(x);
        }
        return v;
    };
    while (std::getline(in, stmt, ';')) {
        size_t here = offset;
        offset += stmt.size() + 1;
        auto b = stmt.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) continue;
        stmt = stmt.substr(b, stmt.find_last_not_of(" \t\r\n") - b + 1);
        std::smatch m;
        if (stmt.rfind("OPENQASM", 0) == 0 || stmt.rfind("include", 0) == 0 || stmt.rfind("creg", 0) == 0 ||
            stmt.rfind("barrier", 0) == 0 || stmt.rfind("measure", 0) == 0)
            continue;
        if (std::regex_match(stmt, m, qreg)) {
            sv = StateVector::zero(std::stoi(m[1]), cap);
            have_reg = true;
            continue;
        }
        if (!have_reg) throw ParseError("gate before qreg", "byte " + std::to_string(here));
        if (std::regex_match(stmt, m, op2)) {
            auto p = parse_params(m[2]);
            int a = std::stoi(m[3]), c = std::stoi(m[4]);
            if (m[1] != "rzz" || p.size() != 1) throw ParseError("unsupported gate '" + stmt + "'", "byte " + std::to_string(here));
            // qelib rzz(t) = diag(1, e^{it}, e^{it}, 1)
            const cplx ph = std::polar(1.0, p[0]);
            for (size_t x = 0; x < sv.amp.size(); ++x)
                if ((x >> a ^ x >> c) & 1) sv.amp[x] *= ph;
            continue;
        }
        if (std::regex_match(stmt, m, op1)) {
            auto p = parse_params(m[2]);
            int q = std::stoi(m[3]);
            if (q >= sv.n) throw ParseError("qubit out of range", "byte " + std::to_string(here));
            Mat2 g;
            const cplx I(0.0, 1.0);
            if (m[1] == "u3" && p.size() == 3) {
                double c = std::cos(p[0] / 2), s = std::sin(p[0] / 2);
                g << c, -std::exp(I * p[2]) * s, std::exp(I * p[1]) * s, std::exp(I * (p[1] + p[2])) * c;
            } else if ((m[1] == "rz" || m[1] == "u1") && p.size() == 1) {
                g << 1.0, 0.0, 0.0, std::exp(I * p[0]);
            } else if (m[1] == "x" && p.empty()) {
                g = pauli_matrix(1);
            } else {
                throw ParseError("unsupported gate '" + stmt + "'", "byte " + std::to_string(here));
            }
            apply_1q(sv, q, g);
            continue;
        }
        throw ParseError("unrecognised statement '" + stmt + "'", "byte " + std::to_string(here));
    }
    return sv;
}

} // namespace rcsw
