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
#include <cmath>
#include <cstdio>

#include "rcsw/estimators.hpp"
#include "rcsw/tn.hpp"

namespace rcsw {

double expansion_eta(int d) {
    if (d <= 0) throw DomainError("degree must be positive");
    return 2.0 * std::sqrt(std::log(2.0) / d);
}

double lower_bound_rank(int n, int d) { return n * (1.0 - expansion_eta(d)) / 9.0; }

double light_cone_rank_bound(int n, int d) { return n * (1.0 - std::exp2(-d)) + 2.0; }

SimpleCost simple_cost(Geometry g, int n, double d) {
    if (n <= 0) throw DomainError("N must be positive");
    SimpleCost s;
    if (g == Geometry::RG)
        s.density = std::min(1.0, 0.125 * (d - 2.0));
    else
        s.density = 1.1 * std::min(1.0, 0.35 * d / std::sqrt(static_cast<double>(n)));
    s.density = std::max(0.0, s.density);
    s.n_eff = s.density * n;
    s.log2_flops = d > 0 ? s.n_eff + std::log2(n * d / 2.0) : s.n_eff;
    return s;
}

double area_law_scaling(double d, double n, int dim) {
    if (dim < 1) throw DomainError("dimension must be at least 1");
    return d * std::pow(n, (dim - 1.0) / dim);
}

EffectiveQubits max_effective_qubits(double eps, double tau, double t_budget, Geometry g, int n_lo, int n_hi) {
    if (!(tau > 0)) throw DomainError("tau must be positive");
    if (t_budget < tau) throw DomainError("time budget must be at least tau");
    if (eps < 0 || n_lo < 1 || n_hi < n_lo) throw DomainError("invalid search range");
    EffectiveQubits best;
    for (int n = n_lo; n <= n_hi; ++n) {
        int d_sat = g == Geometry::RG ? 10 : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n)) / 0.35));
        int d = d_sat;
        if (eps > 0) d = std::min(d_sat, static_cast<int>(std::floor(verifiable_depth(eps, tau, t_budget, n))));
        double v = simple_cost(g, n, d).n_eff;
        if (v > best.n_eff) best = {v, n, d};
    }
    return best;
}

std::string CostSummary::csv_header() {
    return "ensemble,N,d,d_eff,log2_flops,log2_width,log2_flops_sliced,width_budget_log2,n_slices,N_eff,C_density,seed";
}

std::string CostSummary::csv_row() const {
    char buf[512];
    std::snprintf(buf, sizeof buf, "%s,%d,%d,%.6g,%.6f,%.0f,%.6f,%d,%llu,%.6f,%.6f,%llu", ensemble.c_str(), n, d,
                  d_eff, log2_flops, log2_width, log2_flops_sliced, width_budget_log2,
                  static_cast<unsigned long long>(uint64_t{1} << sliced_indices), n_eff, density,
                  static_cast<unsigned long long>(seed));
    return buf;
}

CostSummary summarize_cost(const Circuit &c, const TensorNetwork &tn, const ContractionTree &unsliced,
                           const ContractionTree &sliced, int width_budget_log2) {
    CostSummary s;
    s.ensemble = ensemble_name(c.ensemble);
    s.n = c.n;
    s.d = c.d;
    s.d_eff = c.d_eff();
    // the sliced tree is also a valid unsliced order
    ContractionTree plain = sliced;
    plain.sliced.clear();
    finalize_tree(tn, plain);
    const ContractionTree &best = plain.log2_flops < unsliced.log2_flops ? plain : unsliced;
    s.log2_flops = best.log2_flops;
    s.log2_width = best.max_rank;
    s.log2_flops_sliced = sliced.log2_flops;
    s.width_budget_log2 = width_budget_log2;
    s.sliced_indices = static_cast<int>(sliced.sliced.size());
    double gates = c.n * s.d_eff / 2.0;
    s.n_eff = gates > 0 ? s.log2_flops - std::log2(gates) : s.log2_flops;
    s.density = c.n > 0 ? std::max(0.0, s.n_eff / c.n) : 0.0;
    s.seed = c.seed;
    return s;
}

} // namespace rcsw
