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

// Command-line front end: scenario generation, single solves and the
// OMA vs NOMA experiments.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <noma/experiments.hpp>

namespace {

nlohmann::json read_json(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw std::runtime_error("cannot open " + path);
    return nlohmann::json::parse(f);
}

struct Common
{
    std::optional<std::uint64_t> seed;
    std::string scenario_path;
    std::string out = "out";
    std::string policy = "pairs";
    std::vector<std::vector<noma::UeId>> fixed_groups;
    std::string fixed_path;
    std::size_t max_group_size = 2;
    double epsilon = 1e-4;
    std::size_t max_iters = 200;
    std::string schedule = "jacobi";
    unsigned threads = 1;
};

void add_common(CLI::App* app, Common& c)
{
    app->add_option("--seed", c.seed, "Base RNG seed (overrides the scenario file)");
    app->add_option("--scenario", c.scenario_path, "Scenario config JSON");
    app->add_option("--out", c.out, "Output directory")->capture_default_str();
    app->add_option("--policy", c.policy, "Grouping policy")
        ->check(CLI::IsMember({"oma", "pairs", "noma", "fixed", "exhaustive"}))
        ->capture_default_str();
    app->add_option("--max-group-size", c.max_group_size, "Block size cap for --policy exhaustive")
        ->capture_default_str();
    app->add_option("--groups", c.fixed_path, "JSON list of UE-id groups for --policy fixed");
    app->add_option("--epsilon", c.epsilon, "Fixed-point stopping tolerance")->capture_default_str();
    app->add_option("--max-iters", c.max_iters, "Fixed-point iteration cap")->capture_default_str();
    app->add_option("--schedule", c.schedule, "Update schedule")
        ->check(CLI::IsMember({"jacobi", "gs", "gauss_seidel"}))
        ->capture_default_str();
    app->add_option("--threads", c.threads, "Worker threads")->capture_default_str();
}

noma::GroupingPolicy make_policy(const Common& c)
{
    using noma::GroupingPolicy;
    switch (noma::grouping_mode_from_string(c.policy)) {
    case GroupingPolicy::Mode::oma: return GroupingPolicy::oma();
    case GroupingPolicy::Mode::pairs: return GroupingPolicy::pairs();
    case GroupingPolicy::Mode::exhaustive: return GroupingPolicy::exhaustive(c.max_group_size);
    case GroupingPolicy::Mode::fixed:
        if (c.fixed_path.empty())
            throw std::invalid_argument("--policy fixed needs --groups <json>");
        return GroupingPolicy::fixed(read_json(c.fixed_path).get<std::vector<std::vector<noma::UeId>>>());
    }
    throw std::logic_error("unreachable");
}

noma::SolveConfig make_solve(const Common& c)
{
    noma::SolveConfig cfg;
    cfg.schedule = noma::schedule_from_string(c.schedule);
    cfg.epsilon = c.epsilon;
    cfg.max_iters = c.max_iters;
    cfg.threads = c.threads;
    return cfg;
}

noma::ScenarioConfig make_scenario(const Common& c)
{
    noma::ScenarioConfig sc;
    if (!c.scenario_path.empty())
        sc = noma::scenario_config_from_json(read_json(c.scenario_path));
    if (c.seed)
        sc.seed = *c.seed;
    return sc;
}

void write_file(const std::filesystem::path& p, const std::string& content)
{
    if (p.has_parent_path())
        std::filesystem::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    f << content;
    if (!f)
        throw std::runtime_error("write failed: " + p.string());
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Multi-cell NOMA load coupling: generation, solving and experiments"};
    app.require_subcommand(1);

    // generate
    Common gen_opts;
    gen_opts.out = "-";
    std::string gen_unit = "linear";
    auto* gen = app.add_subcommand("generate", "Write a generated network as JSON");
    gen->add_option("--seed", gen_opts.seed, "RNG seed");
    gen->add_option("--scenario", gen_opts.scenario_path, "Scenario config JSON");
    gen->add_option("--out", gen_opts.out, "Output file ('-' for stdout)")->capture_default_str();
    gen->add_option("--gain-unit", gen_unit, "Gain encoding")->check(CLI::IsMember({"linear", "db"}));

    // solve
    Common solve_opts;
    auto* slv = app.add_subcommand("solve", "Solve one network (network JSON or scenario config)");
    add_common(slv, solve_opts);
    std::string network_path;
    slv->add_option("--network", network_path, "Network JSON as written by 'generate'");

    // experiments
    struct ExperimentCmd
    {
        const char* name;
        const char* help;
        noma::ExperimentSpec::Kind kind;
    };
    const std::vector<ExperimentCmd> cmds{
        {"throughput", "Max cell throughput vs load limit", noma::ExperimentSpec::Kind::throughput_vs_loadlimit},
        {"cell-loads", "Per-cell loads at OMA's max throughput", noma::ExperimentSpec::Kind::cell_loads},
        {"users-cdf", "Share of trials supporting all users", noma::ExperimentSpec::Kind::users_cdf},
        {"spectral-edge", "Spectral efficiency vs cell-edge share", noma::ExperimentSpec::Kind::spectral_vs_edge},
        {"convergence", "Sup-norm step per iteration", noma::ExperimentSpec::Kind::convergence_trace},
        {"verify", "Randomized self-checks; nonzero exit on failure", noma::ExperimentSpec::Kind::verify},
    };
    Common exp_opts;
    noma::ExperimentSpec defaults;
    std::vector<double> load_limits = defaults.load_limits;
    std::vector<double> demands = defaults.demands_bps;
    std::vector<std::size_t> users = defaults.users_per_cell;
    std::vector<double> edge = defaults.edge_fractions;
    std::size_t seeds = defaults.seeds;
    std::size_t trials = defaults.trials;
    double rel_tol = defaults.throughput_rel_tol;
    std::vector<CLI::App*> exp_apps;
    for (const auto& cmd : cmds) {
        auto* sub = app.add_subcommand(cmd.name, cmd.help);
        add_common(sub, exp_opts);
        sub->add_option("--seeds", seeds, "Number of seeds (base, base + 1, ...)")->capture_default_str();
        sub->add_option("--trials", trials, "Trials per point (users-cdf) or verify scale x20")
            ->capture_default_str();
        sub->add_option("--load-limits", load_limits, "Load limits to sweep")->delimiter(',');
        sub->add_option("--demands", demands, "Per-UE demands in bit/s")->delimiter(',');
        sub->add_option("--users", users, "UEs per cell to sweep")->delimiter(',');
        sub->add_option("--edge-fractions", edge, "Cell-edge UE shares to sweep")->delimiter(',');
        sub->add_option("--rel-tol", rel_tol, "Throughput bisection relative tolerance")->capture_default_str();
        exp_apps.push_back(sub);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            const auto sc = make_scenario(gen_opts);
            const auto net = noma::generate(sc);
            auto j = noma::to_json(net, gen_unit);
            j["provenance"] = noma::scenario_to_json(sc, net)["provenance"];
            const std::string text = j.dump(2) + "\n";
            if (gen_opts.out == "-")
                std::cout << text;
            else
                write_file(gen_opts.out, text);
            return 0;
        }

        if (slv->parsed()) {
            const auto net = network_path.empty() ? noma::generate(make_scenario(solve_opts))
                                                  : noma::network_from_json(read_json(network_path));
            const auto policy = make_policy(solve_opts);
            const auto cfg = make_solve(solve_opts);
            nlohmann::json out;
            noma::IterationTrace trace;
            int rc = 0;
            try {
                const auto res = noma::solve(net, policy, cfg);
                trace = res.trace;
                nlohmann::json cells = nlohmann::json::array();
                for (const auto& c : res.cells)
                    cells.push_back(noma::to_json(c));
                const auto feas = noma::check_feasibility(res.rho, net.load_limit());
                out = {{"converged", true},
                       {"rho", std::vector<double>(res.rho.values().begin(), res.rho.values().end())},
                       {"sum_load", noma::objective(res.rho)},
                       {"feasible", feas.feasible},
                       {"violators", feas.violators},
                       {"iterations", res.trace.iterations},
                       {"order_flips", res.trace.total_flips()},
                       {"cells", cells}};
            } catch (const noma::ConvergenceError& e) {
                trace = e.trace();
                out = {{"converged", false}, {"error", e.what()}, {"iterations", trace.iterations}};
                rc = 2;
            }
            std::ostringstream csv;
            noma::write_trace_csv(csv, trace);
            const std::filesystem::path dir(solve_opts.out);
            write_file(dir / "solution.json", out.dump(2) + "\n");
            write_file(dir / "trace.csv", csv.str());
            std::cout << "converged=" << (rc == 0) << " iterations=" << trace.iterations << " -> " << dir.string()
                      << "\n";
            return rc;
        }

        for (std::size_t k = 0; k < cmds.size(); ++k) {
            if (!exp_apps[k]->parsed())
                continue;
            noma::ExperimentSpec spec;
            spec.kind = cmds[k].kind;
            spec.scenario = make_scenario(exp_opts);
            spec.policy = make_policy(exp_opts);
            spec.solve = make_solve(exp_opts);
            spec.load_limits = load_limits;
            spec.demands_bps = demands;
            spec.users_per_cell = users;
            spec.edge_fractions = edge;
            spec.seeds = seeds;
            spec.trials = trials;
            spec.threads = exp_opts.threads;
            spec.throughput_rel_tol = rel_tol;
            spec.out_dir = exp_opts.out;
            bool ok = true;
            const auto manifest = noma::run(spec, &ok);
            std::cout << manifest["summary"].dump(2) << "\n";
            for (const auto& f : manifest["files"])
                std::cout << f["sha256"].get<std::string>() << "  " << f["name"].get<std::string>() << "\n";
            return ok ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
