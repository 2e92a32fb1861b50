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
 * \file noma/scenario.hpp
 *
 * \brief Reproducible hexagonal multi-cell snapshots: wrap-around layout,
 *  COST-231-Hata path loss, log-normal shadowing and Rayleigh fading.
 */

#ifndef NOMA_SCENARIO_HPP
#define NOMA_SCENARIO_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>
#include <nlohmann/json.hpp>

#include <noma/model.hpp>

namespace noma {

inline constexpr const char* kGeneratorVersion = "noma-scenario/1";

struct ScenarioConfig
{
    std::size_t n_rings = 2;              ///< 2 rings -> 19 cells
    double cell_radius_m = 500.0;
    double carrier_ghz = 2.0;
    double total_bw_hz = 2e7;
    std::size_t n_ru = 100;               ///< M
    std::optional<double> ru_bw_hz;       ///< B; derived as total_bw_hz / n_ru when unset
    double ru_power_mw = 800.0;
    double noise_psd_dbm_hz = -173.0;
    double shadowing_sigma_db = 6.0;
    bool rayleigh_fading = true;
    std::size_t ues_per_cell = 30;
    double demand_bps = 1e6;
    std::uint64_t seed = 1;
    double edge_fraction = 0.0;           ///< share of each cell's UEs placed at >= edge_ratio * radius
    bool interior_non_edge = false;       ///< if set, the other UEs are placed below edge_ratio * radius
    double edge_ratio = 0.8;
    bool strongest_cell = true;           ///< home = cell of largest gain instead of the cell the UE was dropped in
    double bs_height_m = 30.0;
    double ue_height_m = 1.5;
    double min_distance_m = 20.0;
    double load_limit = 1.0;

    double ru_bandwidth() const { return ru_bw_hz.value_or(total_bw_hz / static_cast<double>(n_ru)); }
    std::size_t n_cells() const { return 3 * n_rings * (n_rings + 1) + 1; }

    void validate() const
    {
        auto fail = [](const std::string& what) { throw std::invalid_argument("ScenarioConfig: " + what); };
        if (n_ru < 1)
            fail("n_ru must be >= 1");
        if (!(cell_radius_m > 0 && carrier_ghz > 0 && total_bw_hz > 0 && ru_power_mw > 0))
            fail("radius, carrier, bandwidth and power must be positive");
        if (ues_per_cell < 1)
            fail("ues_per_cell must be >= 1");
        if (!(demand_bps >= 0))
            fail("demand_bps must be >= 0");
        if (!(shadowing_sigma_db >= 0))
            fail("shadowing_sigma_db must be >= 0");
        if (!(edge_fraction >= 0.0 && edge_fraction <= 1.0))
            fail("edge_fraction must lie in [0, 1]");
        if (!(edge_ratio > 0.0 && edge_ratio < std::sqrt(3.0) / 2.0))
            fail("edge_ratio must lie in (0, sqrt(3)/2)");
        if (!(bs_height_m > 0 && ue_height_m > 0 && min_distance_m > 0))
            fail("antenna heights and min distance must be positive");
        if (!(load_limit > 0.0 && load_limit <= 1.0))
            fail("load_limit must lie in (0, 1]");
        const double b = ru_bandwidth();
        if (!(b > 0) || std::abs(b * static_cast<double>(n_ru) - total_bw_hz) > 1e-9 * total_bw_hz)
            fail("ru_bw_hz * n_ru must equal total_bw_hz");
    }
};

inline nlohmann::json to_json(const ScenarioConfig& c)
{
    nlohmann::json j = {
        {"n_rings", c.n_rings},
        {"cell_radius_m", c.cell_radius_m},
        {"carrier_ghz", c.carrier_ghz},
        {"total_bw_hz", c.total_bw_hz},
        {"n_ru", c.n_ru},
        {"ru_power_mw", c.ru_power_mw},
        {"noise_psd_dbm_hz", c.noise_psd_dbm_hz},
        {"shadowing_sigma_db", c.shadowing_sigma_db},
        {"rayleigh_fading", c.rayleigh_fading},
        {"ues_per_cell", c.ues_per_cell},
        {"demand_bps", c.demand_bps},
        {"seed", c.seed},
        {"edge_fraction", c.edge_fraction},
        {"interior_non_edge", c.interior_non_edge},
        {"edge_ratio", c.edge_ratio},
        {"strongest_cell", c.strongest_cell},
        {"bs_height_m", c.bs_height_m},
        {"ue_height_m", c.ue_height_m},
        {"min_distance_m", c.min_distance_m},
        {"load_limit", c.load_limit},
    };
    j["ru_bw_hz"] = c.ru_bw_hz ? nlohmann::json(*c.ru_bw_hz) : nlohmann::json(nullptr);
    return j;
}

/// Reads a config; absent keys keep their defaults.
inline ScenarioConfig scenario_config_from_json(const nlohmann::json& j)
{
    ScenarioConfig c;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key) && !j.at(key).is_null())
            field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("n_rings", c.n_rings);
    get("cell_radius_m", c.cell_radius_m);
    get("carrier_ghz", c.carrier_ghz);
    get("total_bw_hz", c.total_bw_hz);
    get("n_ru", c.n_ru);
    if (j.contains("ru_bw_hz") && !j.at("ru_bw_hz").is_null())
        c.ru_bw_hz = j.at("ru_bw_hz").get<double>();
    get("ru_power_mw", c.ru_power_mw);
    get("noise_psd_dbm_hz", c.noise_psd_dbm_hz);
    get("shadowing_sigma_db", c.shadowing_sigma_db);
    get("rayleigh_fading", c.rayleigh_fading);
    get("ues_per_cell", c.ues_per_cell);
    get("demand_bps", c.demand_bps);
    get("seed", c.seed);
    get("edge_fraction", c.edge_fraction);
    get("interior_non_edge", c.interior_non_edge);
    get("edge_ratio", c.edge_ratio);
    get("strongest_cell", c.strongest_cell);
    get("bs_height_m", c.bs_height_m);
    get("ue_height_m", c.ue_height_m);
    get("min_distance_m", c.min_distance_m);
    get("load_limit", c.load_limit);
    return c;
}

// ---- unit conversions ---------------------------------------------------------

/// bits/s -> nats per unit of total bandwidth (M * B).
inline double normalize_demand(double bps, double total_bw_hz) { return bps * std::numbers::ln2 / total_bw_hz; }
inline double denormalize_demand(double nats, double total_bw_hz) { return nats * total_bw_hz / std::numbers::ln2; }

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }

/// Per-RU noise power (mW) of a PSD in dBm/Hz over `bw_hz`.
inline double noise_power_mw(double psd_dbm_hz, double bw_hz)
{
    return dbm_to_mw(psd_dbm_hz + 10.0 * std::log10(bw_hz));
}

// ---- propagation -----------------------------------------------------------------

/// COST-231-Hata, medium city (C = 0). Distances below 20 m are clamped.
inline double cost231_pl_db(double d_km, double f_mhz, double hb_m, double hm_m)
{
    d_km = std::max(d_km, 0.02);
    const double lf = std::log10(f_mhz);
    const double a_hm = (1.1 * lf - 0.7) * hm_m - (1.56 * lf - 0.8);
    return 46.3 + 33.9 * lf - 13.82 * std::log10(hb_m) - a_hm +
           (44.9 - 6.55 * std::log10(hb_m)) * std::log10(d_km);
}

// ---- geometry ---------------------------------------------------------------------

struct Point
{
    double x = 0.0;
    double y = 0.0;
};

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

/**
 * Base-station sites of a hexagonal cluster with `rings` rings around the
 * centre, inter-site distance sqrt(3) * radius. Neighbours lie along
 * multiples of 60 degrees; cell 0 is the centre, then ring by ring.
 */
class HexLayout
{
public:
    HexLayout(std::size_t rings, double radius_m) : rings_(rings), radius_(radius_m)
    {
        const double isd = std::sqrt(3.0) * radius_m;
        const int n = static_cast<int>(rings);
        for (int ring = 0; ring <= n; ++ring) {
            for (int r = -n; r <= n; ++r) {
                for (int q = -n; q <= n; ++q) {
                    const int s = -q - r;
                    const int dist = std::max({std::abs(q), std::abs(r), std::abs(s)});
                    if (dist != ring)
                        continue;
                    sites_.push_back({isd * (q + 0.5 * r), isd * (std::sqrt(3.0) / 2.0) * r});
                }
            }
        }
        // The cluster tiles the plane under shifts of (n+1) a1 + n a2 rotated
        // by multiples of 60 degrees.
        const double sx = isd * ((n + 1) + 0.5 * n);
        const double sy = isd * (std::sqrt(3.0) / 2.0) * n;
        images_.push_back({0.0, 0.0});
        for (int k = 0; k < 6; ++k) {
            const double a = k * std::numbers::pi / 3.0;
            images_.push_back({sx * std::cos(a) - sy * std::sin(a), sx * std::sin(a) + sy * std::cos(a)});
        }
    }

    std::size_t size() const noexcept { return sites_.size(); }
    Point site(std::size_t i) const { return sites_.at(i); }
    double radius() const noexcept { return radius_; }
    std::span<const Point> wrap_images() const noexcept { return images_; }

    /// Distance from site `i` to `p`, minimized over the wrap-around images.
    double wrapped_distance(std::size_t i, Point p) const
    {
        double best = std::numeric_limits<double>::infinity();
        for (const Point& m : images_)
            best = std::min(best, distance({sites_[i].x + m.x, sites_[i].y + m.y}, p));
        return best;
    }

    /// Whether offset `p` from a site lies in that site's hexagon.
    bool in_hexagon(Point p) const
    {
        const double apothem = radius_ * std::sqrt(3.0) / 2.0;
        for (int k = 0; k < 3; ++k) {
            const double a = k * std::numbers::pi / 3.0;
            if (std::abs(p.x * std::cos(a) + p.y * std::sin(a)) > apothem)
                return false;
        }
        return true;
    }

private:
    std::size_t rings_;
    double radius_;
    std::vector<Point> sites_;
    std::vector<Point> images_;
};

/// A generated network together with the UE positions used to build it.
struct Scenario
{
    ScenarioConfig config;
    NetworkModel network;
    std::vector<Point> ue_positions;
    std::vector<double> home_distance_m;
};

/**
 * Draws one snapshot. UEs are uniform in their cell's hexagon; the first
 * round(edge_fraction * ues_per_cell) of each cell are placed at distance
 * >= edge_ratio * radius. Gains combine path loss, shadowing and a unit-mean
 * exponential fading power, one draw per (cell, UE) pair.
 */
inline Scenario generate_scenario(const ScenarioConfig& cfg)
{
    cfg.validate();
    const HexLayout layout(cfg.n_rings, cfg.cell_radius_m);
    const std::size_t n_cells = layout.size();
    const std::size_t per_cell = cfg.ues_per_cell;
    const std::size_t n_ues = n_cells * per_cell;
    const auto n_edge = static_cast<std::size_t>(std::llround(cfg.edge_fraction * static_cast<double>(per_cell)));
    const double edge_r = cfg.edge_ratio * cfg.cell_radius_m;

    boost::random::mt19937_64 rng(cfg.seed);
    boost::random::uniform_real_distribution<double> box(-cfg.cell_radius_m, cfg.cell_radius_m);
    boost::random::normal_distribution<double> shadow(0.0, cfg.shadowing_sigma_db);
    boost::random::exponential_distribution<double> fading(1.0);

    std::vector<CellId> home(n_ues);
    std::vector<Point> pos(n_ues);
    std::vector<double> home_dist(n_ues);
    for (CellId i = 0; i < n_cells; ++i) {
        for (std::size_t u = 0; u < per_cell; ++u) {
            const UeId j = i * per_cell + u;
            const bool edge = u < n_edge;
            Point off;
            while (true) {
                off = {box(rng), box(rng)};
                if (!layout.in_hexagon(off))
                    continue;
                const double r = std::hypot(off.x, off.y);
                if (edge && r < edge_r)
                    continue;
                if (!edge && cfg.interior_non_edge && r >= edge_r)
                    continue;
                break;
            }
            home[j] = i;
            pos[j] = {layout.site(i).x + off.x, layout.site(i).y + off.y};
            home_dist[j] = std::hypot(off.x, off.y);
        }
    }

    const double f_mhz = cfg.carrier_ghz * 1e3;
    std::vector<double> gain(n_cells * n_ues);
    for (UeId j = 0; j < n_ues; ++j) {
        for (CellId i = 0; i < n_cells; ++i) {
            const double d_m = layout.wrapped_distance(i, pos[j]);
            double g_db = -cost231_pl_db(std::max(d_m, cfg.min_distance_m) / 1e3, f_mhz, cfg.bs_height_m,
                                         cfg.ue_height_m);
            if (cfg.shadowing_sigma_db > 0.0)
                g_db += shadow(rng);
            double g = db_to_linear(g_db);
            if (cfg.rayleigh_fading) {
                double h = 0.0;
                while (!(h > 0.0))
                    h = fading(rng);
                g *= h;
            }
            gain[i * n_ues + j] = g;
        }
    }
    if (cfg.strongest_cell) {
        for (UeId j = 0; j < n_ues; ++j) {
            CellId best = home[j];
            for (CellId i = 0; i < n_cells; ++i)
                if (gain[i * n_ues + j] > gain[best * n_ues + j])
                    best = i;
            home[j] = best;
            home_dist[j] = layout.wrapped_distance(best, pos[j]);
        }
    }

    const double b = cfg.ru_bandwidth();
    const double sigma2 = noise_power_mw(cfg.noise_psd_dbm_hz, b);
    const double d = normalize_demand(cfg.demand_bps, cfg.total_bw_hz);
    NetworkModel net(n_cells, std::move(home), std::move(gain), std::vector<double>(n_cells, cfg.ru_power_mw),
                     sigma2, std::vector<double>(n_ues, d), cfg.load_limit);
    return Scenario{cfg, std::move(net), std::move(pos), std::move(home_dist)};
}

inline NetworkModel generate(const ScenarioConfig& cfg) { return generate_scenario(cfg).network; }

/// Network JSON with a provenance header (config echo, seed, generator).
inline nlohmann::json scenario_to_json(const ScenarioConfig& cfg, const NetworkModel& net)
{
    nlohmann::json j = to_json(net);
    j["provenance"] = {{"config", to_json(cfg)}, {"seed", cfg.seed}, {"generator_version", kGeneratorVersion}};
    return j;
}

// ---- small synthetic networks ---------------------------------------------------------

struct SyntheticOptions
{
    std::size_t min_ues = 2;
    std::size_t max_ues = 5;
    double min_demand = 0.02; ///< nats (normalized)
    double max_demand = 0.25;
    double sigma2 = 0.1;
    double power = 1.0;
};

/**
 * Random abstract network for property checks: log-uniform home gains in
 * [0.5, 5], log-uniform cross gains in [0.005, 0.1], uniform demands. Loads
 * stay well below one, so the load-coupling fixed point exists.
 */
inline NetworkModel synthetic_network(std::uint64_t seed, std::size_t n_cells, const SyntheticOptions& opt = {})
{
    boost::random::mt19937_64 rng(seed);
    boost::random::uniform_real_distribution<double> unit(0.0, 1.0);
    auto log_uniform = [&](double lo, double hi) { return lo * std::pow(hi / lo, unit(rng)); };

    std::vector<CellId> home;
    for (CellId i = 0; i < n_cells; ++i) {
        const auto span = opt.max_ues - opt.min_ues + 1;
        const auto count = opt.min_ues + std::min<std::size_t>(span - 1, static_cast<std::size_t>(unit(rng) * span));
        home.insert(home.end(), count, i);
    }
    const std::size_t n_ues = home.size();
    std::vector<double> gain(n_cells * n_ues);
    std::vector<double> demand(n_ues);
    for (UeId j = 0; j < n_ues; ++j) {
        for (CellId i = 0; i < n_cells; ++i)
            gain[i * n_ues + j] = i == home[j] ? log_uniform(0.5, 5.0) : log_uniform(0.005, 0.1);
        demand[j] = opt.min_demand + (opt.max_demand - opt.min_demand) * unit(rng);
    }
    return NetworkModel(n_cells, std::move(home), std::move(gain), std::vector<double>(n_cells, opt.power),
                        opt.sigma2, std::move(demand), 1.0);
}

} // namespace noma

#endif // NOMA_SCENARIO_HPP
