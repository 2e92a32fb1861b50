// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The noma-load-coupling Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

/**
 * \file noma/experiments.hpp
 *
 * \brief OMA vs NOMA experiment harness on generated networks: maximum
 *  supported throughput, cell loads, supported-users statistics, spectral
 *  efficiency against cell-edge share, and convergence traces.
 *
 * Every experiment writes plain CSV plus a JSON manifest listing each output
 * with its SHA-256, so repeated runs can be compared byte for byte.
 */

#ifndef NOMA_EXPERIMENTS_HPP
#define NOMA_EXPERIMENTS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <noma/fixed_point.hpp>
#include <noma/model.hpp>
#include <noma/scenario.hpp>
#include <noma/single_cell.hpp>

namespace noma {

inline constexpr const char* kVersion = "v0.1.0";

// ---- helpers --------------------------------------------------------------------

/// Runs fn(k) for k in [0, n) on up to `threads` workers; results keep index order.
template <typename Fn>
auto parallel_map(std::size_t n, unsigned threads, Fn fn) -> std::vector<decltype(fn(std::size_t{}))>
{
    using T = decltype(fn(std::size_t{}));
    std::vector<T> out(n);
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (threads == 1) {
        for (std::size_t k = 0; k < n; ++k)
            out[k] = fn(k);
        return out;
    }
    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    for (std::size_t k = t; k < n; k += threads)
                        out[k] = fn(k);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    return out;
}

inline std::string sha256_hex(const std::string& data)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i)
        os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    return os.str();
}

/// Seeds of a multi-seed experiment: base, base + 1, ...
inline std::vector<std::uint64_t> derive_seeds(std::uint64_t base, std::size_t count)
{
    std::vector<std::uint64_t> seeds;
    for (std::size_t k = 0; k < count; ++k)
        seeds.push_back(base + k);
    return seeds;
}

struct Band
{
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
};

inline Band band(const std::vector<double>& v)
{
    if (v.empty())
        return {};
    Band b{0.0, v.front(), v.front()};
    for (double x : v) {
        b.mean += x;
        b.min = std::min(b.min, x);
        b.max = std::max(b.max, x);
    }
    b.mean /= static_cast<double>(v.size());
    return b;
}

// ---- supported demand / throughput ---------------------------------------------------

/**
 * Whether `net` (with its demands) is supported: the fixed point from the zero
 * start converges with every load within `limit`. Iterates from zero rise
 * monotonically, so the run stops as soon as one exceeds the limit.
 */
inline bool is_supported(const NetworkModel& net, const GroupingPolicy& policy, double limit,
                         SolveConfig cfg = {}, LoadVector* rho_out = nullptr)
{
    cfg.initial.reset();
    cfg.stop_above = limit;
    try {
        const auto res = solve(net, policy, cfg);
        if (rho_out)
            *rho_out = res.rho;
        return !res.stopped_above && check_feasibility(res.rho, limit).feasible;
    } catch (const ConvergenceError&) {
        return false;
    }
}

struct ThroughputOptions
{
    double rel_tol = 1e-4;      ///< bisection stops once (hi - lo) <= rel_tol * hi
    double initial_bps = 1e6;   ///< first per-UE demand probed
    SolveConfig solve;
};

struct ThroughputResult
{
    double demand_bps = 0.0;          ///< largest supported per-UE demand
    double cell_throughput_mbps = 0.0;
    LoadVector rho;                   ///< loads at that demand
};

/**
 * Largest common per-UE demand the network supports within `load_limit`,
 * by bisection on the demand. Throughput per cell is UEs-per-cell times that
 * demand. `total_bw_hz` converts between bits/s and normalized nats.
 */
inline ThroughputResult max_throughput(const NetworkModel& net, const GroupingPolicy& policy, double load_limit,
                                       double total_bw_hz, const ThroughputOptions& opt = {})
{
    if (!(load_limit > 0.0))
        throw std::invalid_argument("max_throughput: load limit must be positive");
    const double ues_per_cell = static_cast<double>(net.n_ues()) / static_cast<double>(net.n_cells());
    LoadVector rho_lo = LoadVector::zeros(net.n_cells());
    auto supported = [&](double bps, LoadVector* rho) {
        return is_supported(net.with_uniform_demand(normalize_demand(bps, total_bw_hz)), policy, load_limit,
                            opt.solve, rho);
    };

    double lo = 0.0;
    double hi = opt.initial_bps;
    LoadVector rho;
    if (supported(hi, &rho)) {
        do {
            lo = hi;
            rho_lo = rho;
            hi *= 2.0;
        } while (supported(hi, &rho));
    } else {
        // Shrink until something is supported; give up at a negligible demand.
        double probe = hi;
        while (true) {
            probe *= 0.5;
            if (probe < opt.initial_bps * 1e-9)
                return {0.0, 0.0, rho_lo};
            if (supported(probe, &rho)) {
                lo = probe;
                rho_lo = rho;
                break;
            }
            hi = probe;
        }
    }
    while (hi - lo > opt.rel_tol * hi) {
        const double mid = 0.5 * (lo + hi);
        if (supported(mid, &rho)) {
            lo = mid;
            rho_lo = rho;
        } else {
            hi = mid;
        }
    }
    return {lo, ues_per_cell * lo / 1e6, rho_lo};
}

// ---- experiment specification ----------------------------------------------------------

struct ExperimentSpec
{
    enum class Kind { throughput_vs_loadlimit, cell_loads, users_cdf, spectral_vs_edge, convergence_trace, verify };

    Kind kind = Kind::throughput_vs_loadlimit;
    ScenarioConfig scenario;
    GroupingPolicy policy = GroupingPolicy::pairs(); ///< NOMA side; OMA is always the baseline
    SolveConfig solve;
    std::vector<double> load_limits{0.2, 0.4, 0.6, 0.8, 1.0};
    std::vector<double> demands_bps{1.5e6, 0.75e6, 0.15e6};
    std::vector<std::size_t> users_per_cell{10, 20, 30, 40, 50};
    std::vector<double> edge_fractions{0.0, 1.0 / 30, 2.0 / 30, 3.0 / 30, 4.0 / 30, 5.0 / 30, 6.0 / 30};
    std::size_t seeds = 5;
    std::size_t trials = 20;
    double trace_epsilon = 1e-12;   ///< convergence_trace keeps iterating down to this step
    std::size_t trace_max_iters = 20;
    double throughput_rel_tol = 1e-4;
    unsigned threads = 1;
    std::string out_dir = "out";

    void validate() const
    {
        if (trials < 1 || seeds < 1)
            throw std::invalid_argument("ExperimentSpec: trials and seeds must be >= 1");
        scenario.validate();
        policy.validate();
        solve.validate();
        switch (kind) {
        case Kind::throughput_vs_loadlimit:
            if (load_limits.empty())
                throw std::invalid_argument("throughput_vs_loadlimit needs load limits");
            break;
        case Kind::users_cdf:
            if (demands_bps.empty() || users_per_cell.empty())
                throw std::invalid_argument("users_cdf needs demand levels and user counts");
            break;
        case Kind::spectral_vs_edge:
            if (edge_fractions.empty())
                throw std::invalid_argument("spectral_vs_edge needs edge fractions");
            break;
        case Kind::convergence_trace:
            if (demands_bps.empty())
                throw std::invalid_argument("convergence_trace needs demand levels");
            break;
        default:
            break;
        }
    }
};

inline std::string to_string(ExperimentSpec::Kind k)
{
    switch (k) {
    case ExperimentSpec::Kind::throughput_vs_loadlimit: return "throughput_vs_loadlimit";
    case ExperimentSpec::Kind::cell_loads: return "cell_loads";
    case ExperimentSpec::Kind::users_cdf: return "users_cdf";
    case ExperimentSpec::Kind::spectral_vs_edge: return "spectral_vs_edge";
    case ExperimentSpec::Kind::convergence_trace: return "convergence_trace";
    case ExperimentSpec::Kind::verify: return "verify";
    }
    return "?";
}

/// CSV text keyed by file name.
struct ExperimentOutput
{
    std::vector<std::pair<std::string, std::string>> files;
    nlohmann::json summary;
    bool ok = true;
};

inline std::string fmt(double v)
{
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

// ---- experiments ----------------------------------------------------------------------

inline ExperimentOutput throughput_vs_loadlimit(const ExperimentSpec& spec)
{
    const auto seeds = derive_seeds(spec.scenario.seed, spec.seeds);
    const std::vector<std::pair<std::string, GroupingPolicy>> policies{{"oma", GroupingPolicy::oma()},
                                                                       {"noma", spec.policy}};
    ThroughputOptions topt;
    topt.rel_tol = spec.throughput_rel_tol;
    topt.solve = spec.solve;

    // [seed][policy][limit]
    const auto table = parallel_map(seeds.size(), spec.threads, [&](std::size_t s) {
        ScenarioConfig cfg = spec.scenario;
        cfg.seed = seeds[s];
        const auto net = generate(cfg);
        std::vector<std::vector<double>> rows;
        for (const auto& [name, pol] : policies) {
            std::vector<double> row;
            for (double limit : spec.load_limits)
                row.push_back(max_throughput(net, pol, limit, cfg.total_bw_hz, topt).cell_throughput_mbps);
            rows.push_back(std::move(row));
        }
        return rows;
    });

    std::ostringstream per_seed, agg;
    per_seed << "seed,load_limit,policy,throughput_mbps\n";
    agg << "load_limit,policy,mean_mbps,min_mbps,max_mbps,n_seeds\n";
    nlohmann::json summary = nlohmann::json::array();
    for (std::size_t l = 0; l < spec.load_limits.size(); ++l) {
        for (std::size_t p = 0; p < policies.size(); ++p) {
            std::vector<double> vals;
            for (std::size_t s = 0; s < seeds.size(); ++s) {
                vals.push_back(table[s][p][l]);
                per_seed << seeds[s] << ',' << fmt(spec.load_limits[l]) << ',' << policies[p].first << ','
                         << fmt(table[s][p][l]) << '\n';
            }
            const auto b = band(vals);
            agg << fmt(spec.load_limits[l]) << ',' << policies[p].first << ',' << fmt(b.mean) << ',' << fmt(b.min)
                << ',' << fmt(b.max) << ',' << vals.size() << '\n';
        }
        std::vector<double> ratios;
        for (std::size_t s = 0; s < seeds.size(); ++s)
            ratios.push_back(table[s][0][l] > 0 ? table[s][1][l] / table[s][0][l] : 0.0);
        const auto r = band(ratios);
        summary.push_back({{"load_limit", spec.load_limits[l]},
                           {"noma_over_oma_mean", r.mean},
                           {"noma_over_oma_min", r.min},
                           {"noma_over_oma_max", r.max}});
    }
    return {{{"throughput.csv", agg.str()}, {"throughput_seeds.csv", per_seed.str()}}, summary, true};
}

struct CellLoadComparison
{
    double demand_bps = 0.0;
    std::vector<double> oma;
    std::vector<double> noma;
};

/// Loads of both schemes at OMA's largest supported demand under `limit`.
inline CellLoadComparison cell_loads_at_oma_max(const NetworkModel& net, const GroupingPolicy& noma_policy,
                                                double limit, double total_bw_hz, const ThroughputOptions& topt)
{
    const auto oma_max = max_throughput(net, GroupingPolicy::oma(), limit, total_bw_hz, topt);
    const auto at = net.with_uniform_demand(normalize_demand(oma_max.demand_bps, total_bw_hz));
    const auto oma = solve(at, GroupingPolicy::oma(), topt.solve);
    const auto noma = solve(at, noma_policy, topt.solve);
    CellLoadComparison out;
    out.demand_bps = oma_max.demand_bps;
    out.oma.assign(oma.rho.values().begin(), oma.rho.values().end());
    out.noma.assign(noma.rho.values().begin(), noma.rho.values().end());
    return out;
}

inline ExperimentOutput cell_loads(const ExperimentSpec& spec)
{
    const auto seeds = derive_seeds(spec.scenario.seed, spec.seeds);
    ThroughputOptions topt;
    topt.rel_tol = spec.throughput_rel_tol;
    topt.solve = spec.solve;
    const auto results = parallel_map(seeds.size(), spec.threads, [&](std::size_t s) {
        ScenarioConfig cfg = spec.scenario;
        cfg.seed = seeds[s];
        return cell_loads_at_oma_max(generate(cfg), spec.policy, cfg.load_limit, cfg.total_bw_hz, topt);
    });

    std::ostringstream os;
    os << "seed,rank,cell,demand_bps,oma_load,noma_load\n";
    bool dominated = true;
    nlohmann::json summary = nlohmann::json::array();
    for (std::size_t s = 0; s < seeds.size(); ++s) {
        const auto& r = results[s];
        std::vector<std::size_t> order(r.oma.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return r.oma[a] < r.oma[b]; });
        double max_noma = 0.0;
        for (std::size_t rank = 0; rank < order.size(); ++rank) {
            const std::size_t c = order[rank];
            os << seeds[s] << ',' << rank << ',' << c << ',' << fmt(r.demand_bps) << ',' << fmt(r.oma[c]) << ','
               << fmt(r.noma[c]) << '\n';
            dominated = dominated && r.noma[c] < r.oma[c];
            max_noma = std::max(max_noma, r.noma[c]);
        }
        summary.push_back({{"seed", seeds[s]},
                           {"demand_bps", r.demand_bps},
                           {"max_oma_load", *std::max_element(r.oma.begin(), r.oma.end())},
                           {"max_noma_load", max_noma}});
    }
    return {{{"cell_loads.csv", os.str()}}, {{"seeds", summary}, {"noma_strictly_below_oma", dominated}}, true};
}

inline ExperimentOutput users_cdf(const ExperimentSpec& spec)
{
    struct Job { double demand; std::size_t users; std::size_t trial; };
    std::vector<Job> jobs;
    for (double d : spec.demands_bps)
        for (std::size_t u : spec.users_per_cell)
            for (std::size_t t = 0; t < spec.trials; ++t)
                jobs.push_back({d, u, t});

    const auto outcome = parallel_map(jobs.size(), spec.threads, [&](std::size_t k) {
        ScenarioConfig cfg = spec.scenario;
        cfg.ues_per_cell = jobs[k].users;
        cfg.demand_bps = jobs[k].demand;
        cfg.seed = spec.scenario.seed + jobs[k].trial;
        const auto net = generate(cfg);
        const bool oma = is_supported(net, GroupingPolicy::oma(), cfg.load_limit, spec.solve);
        const bool noma = is_supported(net, spec.policy, cfg.load_limit, spec.solve);
        return std::pair<int, int>{oma ? 1 : 0, noma ? 1 : 0};
    });

    std::ostringstream os;
    os << "demand_bps,users_per_cell,policy,supported_fraction,trials\n";
    std::size_t k = 0;
    for (double d : spec.demands_bps) {
        for (std::size_t u : spec.users_per_cell) {
            std::size_t oma = 0, noma = 0;
            for (std::size_t t = 0; t < spec.trials; ++t, ++k) {
                oma += static_cast<std::size_t>(outcome[k].first);
                noma += static_cast<std::size_t>(outcome[k].second);
            }
            const double n = static_cast<double>(spec.trials);
            os << fmt(d) << ',' << u << ",oma," << fmt(static_cast<double>(oma) / n) << ',' << spec.trials << '\n';
            os << fmt(d) << ',' << u << ",noma," << fmt(static_cast<double>(noma) / n) << ',' << spec.trials << '\n';
        }
    }
    return {{{"users_cdf.csv", os.str()}}, {{"jobs", jobs.size()}}, true};
}

inline ExperimentOutput spectral_vs_edge(const ExperimentSpec& spec)
{
    const auto seeds = derive_seeds(spec.scenario.seed, spec.seeds);
    ThroughputOptions topt;
    topt.rel_tol = spec.throughput_rel_tol;
    topt.solve = spec.solve;
    const std::size_t ne = spec.edge_fractions.size();

    // [edge * seeds + seed] -> {oma, noma} bits/s/Hz
    const auto eff = parallel_map(ne * seeds.size(), spec.threads, [&](std::size_t k) {
        ScenarioConfig cfg = spec.scenario;
        cfg.edge_fraction = spec.edge_fractions[k / seeds.size()];
        cfg.interior_non_edge = true;
        cfg.seed = seeds[k % seeds.size()];
        const auto net = generate(cfg);
        const double per_cell = static_cast<double>(cfg.ues_per_cell);
        auto se = [&](const GroupingPolicy& p) {
            const auto r = max_throughput(net, p, cfg.load_limit, cfg.total_bw_hz, topt);
            return r.demand_bps * per_cell / cfg.total_bw_hz;
        };
        return std::pair<double, double>{se(GroupingPolicy::oma()), se(spec.policy)};
    });

    std::ostringstream os;
    os << "edge_percent,policy,mean_bps_per_hz,min_bps_per_hz,max_bps_per_hz,n_seeds\n";
    for (std::size_t e = 0; e < ne; ++e) {
        std::vector<double> oma, noma;
        for (std::size_t s = 0; s < seeds.size(); ++s) {
            oma.push_back(eff[e * seeds.size() + s].first);
            noma.push_back(eff[e * seeds.size() + s].second);
        }
        const double pct = 100.0 * spec.edge_fractions[e];
        for (const auto& [name, vals] : {std::pair{"oma", oma}, std::pair{"noma", noma}}) {
            const auto b = band(vals);
            os << fmt(pct) << ',' << name << ',' << fmt(b.mean) << ',' << fmt(b.min) << ',' << fmt(b.max) << ','
               << vals.size() << '\n';
        }
    }
    return {{{"spectral_edge.csv", os.str()}}, {}, true};
}

/// Per-iteration sup-norm steps at a uniform demand, down to `epsilon`.
inline IterationTrace convergence_trace(const NetworkModel& net, const GroupingPolicy& policy, SolveConfig cfg)
{
    try {
        return solve(net, policy, cfg).trace;
    } catch (const ConvergenceError& e) {
        // Hitting max_iters is expected when epsilon sits at rounding level.
        return e.trace();
    }
}

inline ExperimentOutput convergence_traces(const ExperimentSpec& spec)
{
    const auto seeds = derive_seeds(spec.scenario.seed, spec.seeds);
    SolveConfig cfg = spec.solve;
    cfg.epsilon = spec.trace_epsilon;
    cfg.max_iters = spec.trace_max_iters;
    const std::size_t nd = spec.demands_bps.size();

    const auto traces = parallel_map(nd * seeds.size(), spec.threads, [&](std::size_t k) {
        ScenarioConfig sc = spec.scenario;
        sc.demand_bps = spec.demands_bps[k / seeds.size()];
        sc.seed = seeds[k % seeds.size()];
        return convergence_trace(generate(sc), spec.policy, cfg);
    });

    std::ostringstream os;
    os << "seed,demand_bps,iteration,delta_sup_norm,order_flips\n";
    ExperimentOutput out;
    nlohmann::json summary = nlohmann::json::array();
    for (std::size_t k = 0; k < traces.size(); ++k) {
        const auto& tr = traces[k];
        const double d = spec.demands_bps[k / seeds.size()];
        const auto seed = seeds[k % seeds.size()];
        std::size_t first_below = 0;
        for (std::size_t it = 0; it < tr.deltas.size(); ++it) {
            std::size_t flips = 0;
            for (std::size_t f : tr.flips[it])
                flips += f;
            os << seed << ',' << fmt(d) << ',' << it + 1 << ',' << fmt(tr.deltas[it]) << ',' << flips << '\n';
            if (first_below == 0 && tr.deltas[it] < spec.solve.epsilon)
                first_below = it + 1;
        }
        summary.push_back({{"seed", seed}, {"demand_bps", d}, {"iterations", tr.iterations},
                           {"first_iteration_below_epsilon", first_below}, {"order_flips", tr.total_flips()}});
        if (k % seeds.size() == 0) {
            std::ostringstream full;
            write_trace_csv(full, tr);
            std::ostringstream name;
            name << "trace_" << static_cast<long long>(std::llround(d)) << "bps_seed" << seed << ".csv";
            out.files.emplace_back(name.str(), full.str());
        }
    }
    out.files.insert(out.files.begin(), {"convergence.csv", os.str()});
    out.summary = summary;
    return out;
}

// ---- verification suites -------------------------------------------------------------------

/// Two-cell, four-UE network whose NOMA pair in cell 0 swaps decoding order
/// between the first sweep and the fixed point. Use with fixed_order_flip_policy().
inline NetworkModel order_flip_instance()
{
    // UE 0: strong at zero interference but exposed to cell 1.
    // UE 1: weaker own link, shielded from cell 1.
    // UEs 2, 3: cell 1 users whose demand drives cell 1's load to ~0.8.
    const std::size_t n_ues = 4;
    std::vector<double> gain(2 * n_ues);
    auto g = [&](CellId i, UeId j) -> double& { return gain[i * n_ues + j]; };
    g(0, 0) = 2.0;  g(1, 0) = 2.0;
    g(0, 1) = 1.0;  g(1, 1) = 0.01;
    g(0, 2) = 0.05; g(1, 2) = 2.0;
    g(0, 3) = 0.05; g(1, 3) = 1.5;
    return NetworkModel(2, {0, 0, 1, 1}, std::move(gain), {1.0, 1.0}, 1.0, {0.2, 0.2, 0.45, 0.45}, 1.0);
}

inline GroupingPolicy order_flip_policy() { return GroupingPolicy::fixed({{0, 1}, {2, 3}}); }

struct SuiteResult
{
    std::string name;
    std::size_t checks = 0;
    std::size_t failures = 0;
    nlohmann::json detail;
};

/**
 * The library's randomized self-checks, all seeded from `seed`: order
 * optimality, power/rate round trip, SIF probe, matching exactness,
 * fixed-point uniqueness and convergence through decoding-order flips.
 */
inline std::vector<SuiteResult> run_verification(std::uint64_t seed, std::size_t scale = 1)
{
    std::vector<SuiteResult> out;
    boost::random::mt19937_64 rng(seed);
    boost::random::uniform_real_distribution<double> unit(0.0, 1.0);

    {
        SuiteResult r;
        r.name = "decoding_order_optimality";
        for (std::size_t t = 0; t < 200 * scale; ++t) {
            const std::size_t K = 2 + t % 4;
            std::vector<double> w(K), c(K);
            for (std::size_t k = 0; k < K; ++k) {
                w[k] = 10.0 * (1.0 - unit(rng));
                c[k] = 3.0 * unit(rng);
            }
            const auto rep = verify_theorem1(w, c);
            ++r.checks;
            if (!rep.holds)
                ++r.failures;
        }
        out.push_back(std::move(r));
    }
    {
        SuiteResult r;
        r.name = "power_rate_round_trip";
        double worst = 0.0;
        for (std::size_t t = 0; t < 1000 * scale; ++t) {
            const std::size_t K = 1 + t % 6;
            std::vector<double> w(K), c(K);
            for (std::size_t k = 0; k < K; ++k) {
                w[k] = 10.0 * (1.0 - unit(rng));
                c[k] = 3.0 * unit(rng);
            }
            std::sort(w.begin(), w.end());
            const auto q = recover_power_split(w, c);
            Group grp;
            for (std::size_t k = 0; k < K; ++k)
                grp.members.push_back(k);
            for (std::size_t k = 0; k < K; ++k) {
                const double back = capacity(*q, w[k], grp, k);
                const double err = c[k] == 0.0 ? std::abs(back) : std::abs(back - c[k]) / c[k];
                worst = std::max(worst, err);
                ++r.checks;
                if (err > 1e-10)
                    ++r.failures;
            }
        }
        r.detail = {{"worst_relative_error", worst}};
        out.push_back(std::move(r));
    }
    {
        SuiteResult r;
        r.name = "sif_probe";
        double worst = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < 20 * scale; ++t) {
            const auto net = synthetic_network(seed * 1000 + t, 3 + t % 5);
            SifProbeOptions opt;
            opt.seed = seed + t;
            const auto rep = sif_probe(net, GroupingPolicy::pairs(), 3, opt);
            r.checks += rep.checks;
            r.failures += rep.violations.size();
            worst = std::min(worst, rep.worst_scalability_margin);
        }
        r.detail = {{"worst_scalability_margin", worst}};
        out.push_back(std::move(r));
    }
    {
        SuiteResult r;
        r.name = "matching_exactness";
        SyntheticOptions so;
        so.min_ues = 2;
        so.max_ues = 8;
        for (std::size_t t = 0; t < 40 * scale; ++t) {
            const auto net = synthetic_network(seed * 7919 + t, 2, so);
            LoadVector rho(std::vector<double>{unit(rng), unit(rng)});
            const double matched = solve_cell(net, 0, rho, GroupingPolicy::pairs()).load;
            const double brute = solve_cell(net, 0, rho, GroupingPolicy::exhaustive(2)).load;
            ++r.checks;
            if (matched != brute)
                ++r.failures;
        }
        out.push_back(std::move(r));
    }
    {
        SuiteResult r;
        r.name = "fixed_point_uniqueness";
        double worst = 0.0;
        for (std::size_t t = 0; t < 10 * scale; ++t) {
            const auto net = synthetic_network(seed * 104729 + t, 3 + t % 5);
            SolveConfig tight;
            tight.epsilon = 1e-10;
            const auto from_zero = solve(net, GroupingPolicy::pairs(), tight);
            tight.initial = LoadVector::filled(net.n_cells(), 1.0);
            const auto from_one = solve(net, GroupingPolicy::pairs(), tight);
            SolveConfig gs;
            gs.schedule = Schedule::gauss_seidel;
            const auto jac = solve(net, GroupingPolicy::pairs());
            const auto seid = solve(net, GroupingPolicy::pairs(), gs);
            const double d1 = sup_distance(from_zero.rho, from_one.rho);
            const double d2 = sup_distance(jac.rho, seid.rho);
            worst = std::max(worst, d1);
            r.checks += 2;
            r.failures += (d1 > 1e-6) + (d2 > 10 * gs.epsilon);
        }
        r.detail = {{"worst_start_disagreement", worst}};
        out.push_back(std::move(r));
    }
    {
        SuiteResult r;
        r.name = "order_flip_convergence";
        SolveConfig cfg;
        cfg.max_iters = 50;
        const auto res = solve(order_flip_instance(), order_flip_policy(), cfg);
        r.checks = 1;
        r.failures = (res.trace.total_flips() >= 1 && res.trace.converged) ? 0 : 1;
        r.detail = {{"flips", res.trace.total_flips()}, {"iterations", res.trace.iterations}};
        out.push_back(std::move(r));
    }
    return out;
}

inline ExperimentOutput verify_suites(const ExperimentSpec& spec)
{
    const auto suites = run_verification(spec.scenario.seed, std::max<std::size_t>(1, spec.trials / 20));
    std::ostringstream os;
    os << "suite,checks,failures\n";
    nlohmann::json summary = nlohmann::json::array();
    bool ok = true;
    for (const auto& s : suites) {
        os << s.name << ',' << s.checks << ',' << s.failures << '\n';
        summary.push_back({{"suite", s.name}, {"checks", s.checks}, {"failures", s.failures}, {"detail", s.detail}});
        ok = ok && s.failures == 0 && s.checks > 0;
    }
    return {{{"verify.csv", os.str()}}, summary, ok};
}

// ---- driver -----------------------------------------------------------------------------------

inline nlohmann::json to_json(const GroupingPolicy& p)
{
    return {{"mode", to_string(p.mode)}, {"max_group_size", p.max_group_size}, {"fixed_groups", p.fixed_groups}};
}

/**
 * Runs one experiment, writes its CSV files and `manifest.json` into
 * spec.out_dir, and returns the manifest. The manifest carries no clock
 * values, so identical specs give identical bytes.
 */
inline nlohmann::json run(const ExperimentSpec& spec, bool* ok = nullptr)
{
    spec.validate();
    ExperimentOutput result;
    switch (spec.kind) {
    case ExperimentSpec::Kind::throughput_vs_loadlimit: result = throughput_vs_loadlimit(spec); break;
    case ExperimentSpec::Kind::cell_loads: result = cell_loads(spec); break;
    case ExperimentSpec::Kind::users_cdf: result = users_cdf(spec); break;
    case ExperimentSpec::Kind::spectral_vs_edge: result = spectral_vs_edge(spec); break;
    case ExperimentSpec::Kind::convergence_trace: result = convergence_traces(spec); break;
    case ExperimentSpec::Kind::verify: result = verify_suites(spec); break;
    }

    namespace fs = std::filesystem;
    fs::create_directories(spec.out_dir);
    nlohmann::json files = nlohmann::json::array();
    for (const auto& [name, content] : result.files) {
        std::ofstream f(fs::path(spec.out_dir) / name, std::ios::binary);
        if (!f)
            throw std::runtime_error("cannot write " + (fs::path(spec.out_dir) / name).string());
        f << content;
        if (!f)
            throw std::runtime_error("write failed: " + name);
        files.push_back({{"name", name}, {"sha256", sha256_hex(content)}, {"bytes", content.size()}});
    }

    nlohmann::json manifest = {
        {"kind", to_string(spec.kind)},
        {"version", kVersion},
        {"generator_version", kGeneratorVersion},
        {"base_seed", spec.scenario.seed},
        {"seeds", derive_seeds(spec.scenario.seed, spec.seeds)},
        {"trials", spec.trials},
        {"scenario", to_json(spec.scenario)},
        {"policy", to_json(spec.policy)},
        {"solve", {{"schedule", spec.solve.schedule == Schedule::jacobi ? "jacobi" : "gauss_seidel"},
                   {"epsilon", spec.solve.epsilon},
                   {"max_iters", spec.solve.max_iters}}},
        {"summary", result.summary},
        {"ok", result.ok},
        {"files", files},
    };
    std::ofstream mf(fs::path(spec.out_dir) / "manifest.json", std::ios::binary);
    mf << manifest.dump(2) << '\n';
    if (!mf)
        throw std::runtime_error("write failed: manifest.json");
    if (ok)
        *ok = result.ok;
    return manifest;
}

} // namespace noma

#endif // NOMA_EXPERIMENTS_HPP
