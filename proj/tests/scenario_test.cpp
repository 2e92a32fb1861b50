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


#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include <noma/scenario.hpp>

#include "test_support.hpp"

using namespace noma;

TEST(PathLoss, HandComputedReference)
{
    EXPECT_NEAR(cost231_pl_db(1.0, 2000.0, 30.0, 1.5), oracle::kPathLoss1km, 1e-9);
    EXPECT_NEAR(cost231_pl_db(0.5, 2000.0, 30.0, 1.5), oracle::kPathLoss500m, 1e-9);
    EXPECT_GT(cost231_pl_db(2.0, 2000.0, 30.0, 1.5), cost231_pl_db(1.0, 2000.0, 30.0, 1.5));
    for (double d : {0.05, 0.3, 1.7})
        EXPECT_NEAR(cost231_pl_db(10 * d, 2000.0, 30.0, 1.5) - cost231_pl_db(d, 2000.0, 30.0, 1.5),
                    44.9 - 6.55 * std::log10(30.0), 1e-9);
}

TEST(Units, NoiseAndDemandConversions)
{
    // -173 dBm/Hz over 200 kHz: 10^(-17.3) mW/Hz * 2e5 Hz.
    EXPECT_NEAR(noise_power_mw(-173.0, 2e5), std::pow(10.0, -17.3) * 2e5, 1e-25);
    EXPECT_NEAR(normalize_demand(1e6, 2e7), 1e6 * std::log(2.0) / 2e7, 1e-18);
    for (double bps : {1.0, 1.5e6, 3.3e7})
        EXPECT_NEAR(denormalize_demand(normalize_demand(bps, 2e7), 2e7), bps, 1e-12 * bps);
}

TEST(HexLayout, NineteenSitesAndTorusSymmetry)
{
    const HexLayout layout(2, 500.0);
    ASSERT_EQ(layout.size(), 19u);
    EXPECT_EQ(layout.wrap_images().size(), 7u);
    const double isd = std::sqrt(3.0) * 500.0;
    std::vector<double> reference;
    for (std::size_t i = 0; i < 19; ++i) {
        std::vector<double> d;
        for (std::size_t k = 0; k < 19; ++k)
            d.push_back(std::round(layout.wrapped_distance(i, layout.site(k)) / isd * 1e6) / 1e6);
        std::sort(d.begin(), d.end());
        if (i == 0)
            reference = d;
        EXPECT_EQ(d, reference) << "cell " << i;
    }
    // Every cell has six neighbours at one inter-site distance on the torus.
    EXPECT_EQ(std::count(reference.begin(), reference.end(), 1.0), 6);
    EXPECT_EQ(std::count(reference.begin(), reference.end(), 0.0), 1);
}

TEST(Generate, DeterministicPerSeed)
{
    ScenarioConfig cfg;
    cfg.ues_per_cell = 5;
    EXPECT_EQ(generate(cfg), generate(cfg));
    auto other = cfg;
    other.seed = 2;
    EXPECT_FALSE(generate(cfg) == generate(other));
}

TEST(Generate, ShapeAndUnits)
{
    ScenarioConfig cfg;
    cfg.ues_per_cell = 4;
    cfg.demand_bps = 1.5e6;
    const auto net = generate(cfg);
    EXPECT_EQ(net.n_cells(), 19u);
    EXPECT_EQ(net.n_ues(), 76u);
    EXPECT_NEAR(net.sigma2(), noise_power_mw(-173.0, 2e5), 1e-25);
    EXPECT_EQ(net.p_ru(5), 800.0);
    for (UeId j = 0; j < net.n_ues(); ++j) {
        EXPECT_NEAR(net.demand(j), 1.5e6 * std::log(2.0) / 2e7, 1e-15);
        for (CellId i = 0; i < 19; ++i)
            EXPECT_TRUE(std::isfinite(net.gain(i, j)) && net.gain(i, j) > 0.0);
    }
}

TEST(Generate, DeterministicGainMatchesPathLoss)
{
    ScenarioConfig cfg;
    cfg.ues_per_cell = 6;
    cfg.shadowing_sigma_db = 0.0;
    cfg.rayleigh_fading = false;
    cfg.strongest_cell = false;
    const auto sc = generate_scenario(cfg);
    const HexLayout layout(2, 500.0);
    for (UeId j = 0; j < sc.network.n_ues(); ++j) {
        const CellId home = sc.network.home(j);
        EXPECT_EQ(home, j / 6);
        const double d = std::hypot(sc.ue_positions[j].x - layout.site(home).x,
                                    sc.ue_positions[j].y - layout.site(home).y);
        const double want = std::pow(10.0, -cost231_pl_db(std::max(d, 20.0) / 1e3, 2000.0, 30.0, 1.5) / 10.0);
        EXPECT_NEAR(sc.network.gain(home, j), want, 1e-9 * want);
    }
}

TEST(Generate, StrongestCellAssociation)
{
    ScenarioConfig cfg;
    cfg.ues_per_cell = 10;
    const auto net = generate(cfg);
    for (UeId j = 0; j < net.n_ues(); ++j)
        for (CellId i = 0; i < net.n_cells(); ++i)
            EXPECT_LE(net.gain(i, j), net.gain(net.home(j), j));
}

TEST(Generate, EdgeUsersBeyondEightyPercent)
{
    ScenarioConfig cfg;
    cfg.ues_per_cell = 30;
    cfg.edge_fraction = 0.2;
    cfg.interior_non_edge = true;
    cfg.strongest_cell = false;
    const auto sc = generate_scenario(cfg);
    for (UeId j = 0; j < sc.network.n_ues(); ++j) {
        if (j % 30 < 6)
            EXPECT_GE(sc.home_distance_m[j], 400.0);
        else
            EXPECT_LT(sc.home_distance_m[j], 400.0);
    }
}

TEST(Generate, HomeLinkStrongerThanFarImagesOnAverage)
{
    double home_db = 0.0, far_db = 0.0;
    std::size_t n = 0;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        ScenarioConfig cfg;
        cfg.seed = seed;
        cfg.ues_per_cell = 5;
        cfg.strongest_cell = false;
        const auto net = generate(cfg);
        for (UeId j = 0; j < net.n_ues(); ++j) {
            double worst = std::numeric_limits<double>::infinity();
            for (CellId i = 0; i < net.n_cells(); ++i)
                worst = std::min(worst, net.gain(i, j));
            home_db += linear_to_db(net.gain(net.home(j), j));
            far_db += linear_to_db(worst);
            ++n;
        }
    }
    EXPECT_GT(home_db / n, far_db / n + 10.0);
}

TEST(ScenarioConfig, ValidationAndJson)
{
    ScenarioConfig cfg;
    cfg.ru_bw_hz = 1.8e5;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg.ru_bw_hz = 2e5;
    EXPECT_NO_THROW(cfg.validate());
    ScenarioConfig bad;
    bad.edge_fraction = 1.5;
    EXPECT_THROW(bad.validate(), std::invalid_argument);

    ScenarioConfig c2;
    c2.seed = 42;
    c2.ues_per_cell = 17;
    c2.strongest_cell = false;
    const auto back = scenario_config_from_json(to_json(c2));
    EXPECT_EQ(to_json(back), to_json(c2));
    EXPECT_EQ(generate(back), generate(c2));
}
