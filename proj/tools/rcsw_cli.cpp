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

// Batch front-end: every command is a pure function of its flags and seeds.

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rcsw/bootstrap.hpp"
#include "rcsw/circuit.hpp"
#include "rcsw/estimators.hpp"
#include "rcsw/io.hpp"
#include "rcsw/mps.hpp"
#include "rcsw/statevector.hpp"
#include "rcsw/tn.hpp"

using namespace rcsw;
using nlohmann::json;

namespace {

struct Config {
    std::string ensemble = "rg";
    std::vector<int> n{12};
    std::vector<int> d{8};
    int instances = 1;
    uint64_t seed = 2026;
    std::string out = "out";

    double eps2q = 1.57e-3;
    double mem = 4.0e-4;
    double eps1q = 0.0;
    double spam = 1.47e-3;
    bool scale56 = false;
    int trajectories = 64;
    int resamples = 1000;

    std::vector<int> chi{8};
    std::vector<int> blocks{0};
    double target_eps = 1e-3;

    int width_budget = 20;
    int budget = 16;
    int anneal_sweeps = 200;
    std::string method = "partition";
    int split_rank = 2;
    bool trees = false;

    int nj = 50;
    int nper = 20;
    int kmax = 6;
    std::string shots_csv;

    std::vector<double> mu{0.1, 1.0};
    double fidelity = 0.35;
    std::string observable = "xeb";
    int experiments = 500;
    int circuits = 50;
    int shots = 20;

    json to_json() const {
        return {{"ensemble", ensemble}, {"n", n}, {"d", d}, {"instances", instances}, {"seed", seed},
                {"noise_eps2q", eps2q}, {"noise_mem", mem}, {"noise_eps1q", eps1q}, {"spam", spam},
                {"scale_56_over_n", scale56}, {"trajectories", trajectories}, {"resamples", resamples},
                {"chi", chi}, {"blocks", blocks}, {"target_eps", target_eps}, {"width_budget", width_budget},
                {"budget", budget}, {"anneal_sweeps", anneal_sweeps}, {"method", method},
                {"split_rank", split_rank}, {"nj", nj}, {"nper", nper}, {"kmax", kmax}, {"mu", mu},
                {"fidelity", fidelity}, {"observable", observable}, {"experiments", experiments},
                {"circuits", circuits}, {"shots", shots}};
    }
};

std::string join(const std::string &dir, const std::string &name) { return dir + "/" + name; }

uint64_t instance_seed(const Config &cfg, int n, int d, int i) {
    return derive_seed(derive_seed(derive_seed(cfg.seed, n), d), i);
}

void write_manifest(const Config &cfg, const std::string &command, const std::vector<std::string> &outputs) {
    json m{{"command", command}, {"config", cfg.to_json()}, {"outputs", outputs}, {"created_utc", utc_timestamp()}};
    write_atomic(join(cfg.out, command + "_manifest.json"), m.dump(2) + "\n");
}

std::string instance_name(const std::string &ens, int n, int d, int i) {
    return ens + "_n" + std::to_string(n) + "_d" + std::to_string(d) + "_i" + std::to_string(i);
}

int cmd_generate(const Config &cfg) {
    Ensemble e = ensemble_from_name(cfg.ensemble);
    std::vector<std::string> outputs;
    json index = json::array();
    for (int n : cfg.n)
        for (int d : cfg.d)
            for (int i = 0; i < cfg.instances; ++i) {
                uint64_t s = instance_seed(cfg, n, d, i);
                auto c = make_circuit(e, n, d, s);
                std::string base = join("circuits", instance_name(cfg.ensemble, n, d, i));
                write_atomic(join(cfg.out, base + ".json"), to_json(c) + "\n");
                write_atomic(join(cfg.out, base + ".qasm"), export_qasm(c));
                outputs.push_back(base + ".json");
                outputs.push_back(base + ".qasm");
                index.push_back({{"n", n}, {"d", d}, {"instance", i}, {"seed", s}, {"file", base + ".json"}});
            }
    write_atomic(join(cfg.out, "circuits/index.json"), index.dump(2) + "\n");
    outputs.push_back("circuits/index.json");
    write_manifest(cfg, "generate", outputs);
    return 0;
}

int cmd_cost(const Config &cfg) {
    Ensemble e = ensemble_from_name(cfg.ensemble);
    OrderMethod m = order_method_from_name(cfg.method);
    OptimizerBudget budget{cfg.budget, cfg.anneal_sweeps};
    std::string rows = csv_line({"ensemble", "N", "d", "d_eff", "log2_flops", "log2_width", "log2_flops_sliced",
                                 "width_budget_log2", "n_slices", "N_eff", "C_density", "seed", "instance"});
    std::string summary = csv_line({"ensemble", "N", "d", "instances", "C_median", "C_min", "C_max",
                                    "log2_flops_median", "log2_flops_min", "log2_flops_max",
                                    "log2_flops_sliced_median", "width_budget_log2", "seed"});
    std::vector<std::string> outputs{"cost.csv", "cost_summary.csv"};
    for (int n : cfg.n)
        for (int d : cfg.d) {
            std::vector<CostSummary> res(cfg.instances);
            std::vector<std::string> tree_json(cfg.instances);
            parallel_for(cfg.instances, [&](size_t i) {
                uint64_t s = instance_seed(cfg, n, d, static_cast<int>(i));
                auto c = make_circuit(e, n, d, s);
                auto tn = circuit_to_tn(c, 0, cfg.split_rank);
                auto tree = optimize_order(tn, budget, m, s);
                ContractionTree sliced;
                bool feasible = true;
                try {
                    sliced = slice_tree(tn, tree, cfg.width_budget, budget, m, s);
                } catch (const InfeasibleBudget &) {
                    sliced = tree;
                    feasible = false;
                }
                res[i] = summarize_cost(c, tn, tree, sliced, cfg.width_budget);
                res[i].seed = s;
                if (!feasible) res[i].log2_flops_sliced = NAN;
                if (cfg.trees) tree_json[i] = tree.to_json();
            });
            std::vector<double> dens, flops, sliced;
            for (int i = 0; i < cfg.instances; ++i) {
                const auto &r = res[i];
                rows += csv_line({r.ensemble, std::to_string(n), std::to_string(d), fmt_double(r.d_eff),
                                  fmt_double(r.log2_flops), fmt_double(r.log2_width), fmt_double(r.log2_flops_sliced),
                                  std::to_string(r.width_budget_log2),
                                  std::isnan(r.log2_flops_sliced) ? "nan" : fmt_double(std::ldexp(1.0, r.sliced_indices)),
                                  fmt_double(r.n_eff), fmt_double(r.density), std::to_string(r.seed),
                                  std::to_string(i)});
                dens.push_back(r.density);
                flops.push_back(r.log2_flops);
                sliced.push_back(r.log2_flops_sliced);
                if (cfg.trees) {
                    std::string name = join("trees", instance_name(cfg.ensemble, n, d, i) + ".json");
                    write_atomic(join(cfg.out, name), tree_json[i] + "\n");
                    outputs.push_back(name);
                }
            }
            std::sort(dens.begin(), dens.end());
            std::sort(flops.begin(), flops.end());
            std::sort(sliced.begin(), sliced.end());
            summary += csv_line({cfg.ensemble, std::to_string(n), std::to_string(d), std::to_string(cfg.instances),
                                 fmt_double(quantile_sorted(dens, 0.5)), fmt_double(dens.front()),
                                 fmt_double(dens.back()), fmt_double(quantile_sorted(flops, 0.5)),
                                 fmt_double(flops.front()), fmt_double(flops.back()),
                                 fmt_double(quantile_sorted(sliced, 0.5)), std::to_string(cfg.width_budget),
                                 std::to_string(cfg.seed)});
        }
    write_atomic(join(cfg.out, "cost.csv"), rows);
    write_atomic(join(cfg.out, "cost_summary.csv"), summary);
    write_manifest(cfg, "cost", outputs);
    return 0;
}

int cmd_fidelity(const Config &cfg) {
    GateCountParams gc;
    gc.eps_2q = cfg.eps2q;
    gc.eps_mem = cfg.mem;
    gc.p_spam = cfg.spam;
    gc.scale_by_56_over_n = cfg.scale56;
    NoiseModel nm = NoiseModel::from_infidelities(cfg.eps2q, cfg.mem, cfg.eps1q, cfg.spam, cfg.scale56);
    std::string rows = csv_line({"estimator", "N", "d", "value", "ci_low", "ci_high", "n_samples", "instances", "seed"});
    json reports = json::array();
    auto emit = [&](const std::string &name, int n, int d, const BootCI &ci, size_t samples) {
        rows += csv_line({name, std::to_string(n), std::to_string(d), fmt_double(ci.estimate), fmt_double(ci.low),
                          fmt_double(ci.high), std::to_string(samples), std::to_string(cfg.instances),
                          std::to_string(cfg.seed)});
        FidelityReport r{name, ci.estimate, ci.low, ci.high, samples, {{"N", n}, {"d", d}}};
        reports.push_back(json::parse(r.to_json()));
    };
    for (int n : cfg.n)
        for (int d : cfg.d) {
            double f_gc = gate_counting(gc, n, d);
            emit("gc", n, d, {f_gc, f_gc, f_gc, f_gc, f_gc, BootMethod::Aggregate, 0}, 0);
            ShotTable xeb_t, true_t, mb_t;
            xeb_t.circuits.resize(cfg.instances);
            true_t.circuits.resize(cfg.instances);
            mb_t.circuits.resize(cfg.instances);
            try {
                parallel_for(cfg.instances, [&](size_t i) {
                    uint64_t s = instance_seed(cfg, n, d, static_cast<int>(i));
                    auto c = make_circuit(Ensemble::RG, n, d, s);
                    auto r = run_trajectories(c, nm, cfg.trajectories, derive_seed(s, 1));
                    xeb_t.circuits[i] = r.per_traj_xeb;
                    true_t.circuits[i] = r.per_traj_fidelity;
                    auto mirror = make_circuit(Ensemble::Mirror, n, d, s);
                    mb_t.circuits[i] = run_trajectories(mirror, nm, cfg.trajectories, derive_seed(s, 2)).per_traj_return;
                });
            } catch (const CapacityError &ex) {
                std::cerr << "N=" << n << ": " << ex.what() << "; only gate counting reported\n";
                continue;
            }
            uint64_t bs = derive_seed(cfg.seed, static_cast<uint64_t>(n) * 1000 + d);
            emit("xeb", n, d, bootstrap_ci(xeb_t, Statistic::Mean, BootMethod::Aggregate, cfg.resamples, bs),
                 xeb_t.total());
            emit("mb", n, d, bootstrap_ci(mb_t, Statistic::Mean, BootMethod::Aggregate, cfg.resamples, bs + 1),
                 mb_t.total());
            emit("true", n, d, bootstrap_ci(true_t, Statistic::Mean, BootMethod::Aggregate, cfg.resamples, bs + 2),
                 true_t.total());
        }
    write_atomic(join(cfg.out, "fidelity.csv"), rows);
    write_atomic(join(cfg.out, "fidelity.json"), reports.dump(2) + "\n");
    write_manifest(cfg, "fidelity", {"fidelity.csv", "fidelity.json"});
    return 0;
}

int cmd_mps(const Config &cfg) {
    Ensemble e = ensemble_from_name(cfg.ensemble);
    std::string rows = csv_line({"ensemble", "N", "d", "chi", "blocking", "F_mps", "eps_mps", "flops_est", "seed"});
    std::string table = csv_line({"ensemble", "N", "d", "blocks", "chi", "eps_median", "eps_q25", "eps_q75",
                                  "log2_chi_at_target", "target_eps", "seed"});
    for (int n : cfg.n)
        for (int d : cfg.d) {
            std::vector<std::pair<int, int>> grid; // (blocks, chi)
            for (int b : cfg.blocks)
                for (int chi : cfg.chi) grid.push_back({b > 0 ? b : default_mps_blocks(n), chi});
            std::vector<MpsRunReport> runs(grid.size() * cfg.instances);
            parallel_for(runs.size(), [&](size_t k) {
                int i = static_cast<int>(k % cfg.instances);
                auto [b, chi] = grid[k / cfg.instances];
                uint64_t s = instance_seed(cfg, n, d, i);
                runs[k] = evolve(make_circuit(e, n, d, s), chi, b, s).report;
            });
            for (const auto &r : runs)
                rows += csv_line({cfg.ensemble, std::to_string(r.n), std::to_string(r.d), std::to_string(r.chi),
                                  r.blocking, fmt_double(r.f_mps), fmt_double(r.eps_mps), fmt_double(r.flops_est),
                                  std::to_string(r.seed)});
            if (std::set<int>(cfg.chi.begin(), cfg.chi.end()).size() < 2) continue;
            auto t = tabulate_eps_chi(runs, cfg.target_eps);
            std::map<int, double> extrap;
            std::vector<int> order;
            for (const auto &row : t.rows)
                if (std::find(order.begin(), order.end(), row.blocks) == order.end()) order.push_back(row.blocks);
            for (size_t k = 0; k < order.size(); ++k) extrap[order[k]] = t.log2_chi_at_target[k];
            for (const auto &row : t.rows)
                table += csv_line({cfg.ensemble, std::to_string(n), std::to_string(d), std::to_string(row.blocks),
                                   std::to_string(row.chi), fmt_double(row.median), fmt_double(row.q25),
                                   fmt_double(row.q75), fmt_double(extrap[row.blocks]), fmt_double(cfg.target_eps),
                                   std::to_string(cfg.seed)});
        }
    write_atomic(join(cfg.out, "mps.csv"), rows);
    write_atomic(join(cfg.out, "mps_eps_chi.csv"), table);
    write_manifest(cfg, "mps", {"mps.csv", "mps_eps_chi.csv"});
    return 0;
}

// circuit_id,value rows (header optional)
ShotTable read_shots(const std::string &path) {
    std::istringstream in(read_file(path));
    std::map<std::string, std::vector<double>> by_id;
    std::vector<std::string> order;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError("expected circuit_id,value", "line " + std::to_string(lineno));
        std::string id = line.substr(0, comma), val = line.substr(comma + 1);
        double v;
        try {
            size_t used;
            v = std::stod(val, &used);
            if (used != val.size()) throw std::invalid_argument(val);
        } catch (const std::exception &) {
            if (lineno == 1) continue;
            throw ParseError("bad value '" + val + "'", "line " + std::to_string(lineno));
        }
        if (!by_id.count(id)) order.push_back(id);
        by_id[id].push_back(v);
    }
    ShotTable t;
    for (const auto &id : order) t.circuits.push_back(by_id[id]);
    if (t.circuits.empty()) throw EmptyTable("no shots in " + path);
    return t;
}

int cmd_bootstrap(const Config &cfg) {
    std::string rows = csv_line({"k", "p_aggregate", "p_double", "N_j", "N_per"});
    auto dbl = p_double_table(cfg.nj, cfg.nper, cfg.kmax);
    for (int k = 0; k <= cfg.kmax; ++k)
        rows += csv_line({std::to_string(k), fmt_double(p_aggregate(k, cfg.nj * cfg.nper)), fmt_double(dbl[k]),
                          std::to_string(cfg.nj), std::to_string(cfg.nper)});
    write_atomic(join(cfg.out, "resample_counts.csv"), rows);
    std::vector<std::string> outputs{"resample_counts.csv"};
    if (!cfg.shots_csv.empty()) {
        auto table = read_shots(cfg.shots_csv);
        std::string ci = csv_line({"method", "estimate", "ci_low", "ci_high", "q_minus", "q_plus", "resamples", "seed"});
        for (auto m : {BootMethod::Aggregate, BootMethod::Double}) {
            auto r = bootstrap_ci(table, Statistic::Mean, m, cfg.resamples, cfg.seed);
            ci += csv_line({method_name(m), fmt_double(r.estimate), fmt_double(r.low), fmt_double(r.high),
                            fmt_double(r.q_minus), fmt_double(r.q_plus), std::to_string(r.r), std::to_string(cfg.seed)});
        }
        write_atomic(join(cfg.out, "bootstrap_ci.csv"), ci);
        outputs.push_back("bootstrap_ci.csv");
    }
    write_manifest(cfg, "bootstrap", outputs);
    return 0;
}

int cmd_coverage(const Config &cfg) {
    ExperimentModel m;
    if (cfg.observable == "xeb") {
        m.observable = Observable::Xeb;
    } else if (cfg.observable == "mb") {
        m.observable = Observable::Mb;
    } else {
        throw DomainError("observable must be xeb or mb");
    }
    m.fidelity = cfg.fidelity;
    std::string rows = csv_line({"model", "mu", "method", "coverage", "n_experiments", "fidelity", "truth", "seed"});
    for (size_t i = 0; i < cfg.mu.size(); ++i) {
        m.mu = cfg.mu[i];
        uint64_t s = derive_seed(cfg.seed, i);
        auto r = coverage(m, cfg.experiments, cfg.circuits, cfg.shots, cfg.resamples, s);
        for (auto [name, cov] : {std::pair{"aggregate", r.aggregate}, std::pair{"double", r.double_}})
            rows += csv_line({cfg.observable, fmt_double(m.mu), name, fmt_double(cov), std::to_string(r.n_experiments),
                              fmt_double(m.fidelity), fmt_double(r.truth), std::to_string(s)});
    }
    write_atomic(join(cfg.out, "coverage.csv"), rows);
    write_manifest(cfg, "coverage", {"coverage.csv"});
    return 0;
}

void add_common(CLI::App *app, Config &cfg) {
    app->add_option("--ensemble", cfg.ensemble, "rg, 2d, 1d or mirror")->capture_default_str();
    app->add_option("--n", cfg.n, "qubit counts")->capture_default_str();
    app->add_option("--d", cfg.d, "depths")->capture_default_str();
    app->add_option("--instances", cfg.instances, "circuits per (N, d)")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--seed", cfg.seed, "master seed")->capture_default_str();
    app->add_option("--out", cfg.out, "output directory")->capture_default_str();
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Random circuit sampling workbench"};
    app.require_subcommand(1);
    Config cfg;

    auto *gen = app.add_subcommand("generate", "write circuit JSON and QASM files");
    add_common(gen, cfg);

    auto *cost = app.add_subcommand("cost", "contraction cost and complexity density");
    add_common(cost, cfg);
    cost->add_option("--width-budget", cfg.width_budget, "log2 of the slicing width budget")->capture_default_str();
    cost->add_option("--budget", cfg.budget, "optimizer trials")->check(CLI::PositiveNumber)->capture_default_str();
    cost->add_option("--anneal-sweeps", cfg.anneal_sweeps)->capture_default_str();
    cost->add_option("--method", cfg.method, "greedy, partition or annealed")->capture_default_str();
    cost->add_option("--split-rank", cfg.split_rank, "2 (split UZZ) or 4")->check(CLI::IsMember({2, 4}))->capture_default_str();
    cost->add_flag("--trees", cfg.trees, "also write contraction trees as JSON");

    auto *fid = app.add_subcommand("fidelity", "XEB, MB, true and gate-counting fidelities");
    add_common(fid, cfg);
    fid->add_option("--noise-eps2q", cfg.eps2q, "average 2Q infidelity")->capture_default_str();
    fid->add_option("--noise-mem", cfg.mem, "average memory infidelity per layer")->capture_default_str();
    fid->add_option("--noise-eps1q", cfg.eps1q, "1Q depolarising probability")->capture_default_str();
    fid->add_option("--spam", cfg.spam, "readout flip probability")->capture_default_str();
    fid->add_flag("--scale-56-over-n", cfg.scale56, "hold the per-layer error at its 56-qubit value");
    fid->add_option("--trajectories", cfg.trajectories)->check(CLI::PositiveNumber)->capture_default_str();
    fid->add_option("--resamples", cfg.resamples)->check(CLI::Range(100, 1000000))->capture_default_str();

    auto *mps = app.add_subcommand("mps", "blocked MPS truncation error versus bond dimension");
    add_common(mps, cfg);
    mps->add_option("--chi", cfg.chi, "bond dimensions")->capture_default_str();
    mps->add_option("--blocks", cfg.blocks, "block counts (0: default)")->capture_default_str();
    mps->add_option("--target-eps", cfg.target_eps, "eps for the chi extrapolation")->capture_default_str();

    auto *boot = app.add_subcommand("bootstrap", "resampling-count tables and bootstrap intervals");
    boot->add_option("--seed", cfg.seed)->capture_default_str();
    boot->add_option("--out", cfg.out)->capture_default_str();
    boot->add_option("--nj", cfg.nj, "circuits")->check(CLI::PositiveNumber)->capture_default_str();
    boot->add_option("--nper", cfg.nper, "shots per circuit")->check(CLI::PositiveNumber)->capture_default_str();
    boot->add_option("--kmax", cfg.kmax)->check(CLI::NonNegativeNumber)->capture_default_str();
    boot->add_option("--shots-csv", cfg.shots_csv, "circuit_id,value rows to bootstrap");
    boot->add_option("--resamples", cfg.resamples)->check(CLI::Range(100, 1000000))->capture_default_str();

    auto *cov = app.add_subcommand("coverage", "coverage of aggregate and double bootstrap intervals");
    cov->add_option("--seed", cfg.seed)->capture_default_str();
    cov->add_option("--out", cfg.out)->capture_default_str();
    cov->add_option("--mu", cfg.mu, "relative spread of per-circuit error")->capture_default_str();
    cov->add_option("--fidelity", cfg.fidelity)->capture_default_str();
    cov->add_option("--observable", cfg.observable, "xeb or mb")->capture_default_str();
    cov->add_option("--experiments", cfg.experiments)->check(CLI::PositiveNumber)->capture_default_str();
    cov->add_option("--circuits", cfg.circuits)->check(CLI::PositiveNumber)->capture_default_str();
    cov->add_option("--shots", cfg.shots)->check(CLI::PositiveNumber)->capture_default_str();
    cov->add_option("--resamples", cfg.resamples)->check(CLI::Range(100, 1000000))->capture_default_str();

    CLI11_PARSE(app, argc, argv);
    try {
        if (*gen) return cmd_generate(cfg);
        if (*cost) return cmd_cost(cfg);
        if (*fid) return cmd_fidelity(cfg);
        if (*mps) return cmd_mps(cfg);
        if (*boot) return cmd_bootstrap(cfg);
        if (*cov) return cmd_coverage(cfg);
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
