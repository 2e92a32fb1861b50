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
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include <noma/scenario.hpp>
#include <noma/single_cell.hpp>

#include "test_support.hpp"

using namespace noma;

namespace {

// Oracle block load for positions of a cell, using effective noise computed by hand.
struct HandCell
{
    std::vector<double> w, d;
    double p;

    long double block(const std::vector<std::size_t>& b) const
    {
        std::vector<double> wb, db;
        for (auto k : b) {
            wb.push_back(w[k]);
            db.push_back(d[k]);
        }
        return oracle::min_load(wb, db, p);
    }
};

HandCell hand_cell(const NetworkModel& net, CellId cell, const LoadVector& rho)
{
    HandCell h;
    h.p = net.p_ru(cell);
    for (UeId j : net.ues_of(cell)) {
        double interference = 0.0;
        for (CellId k = 0; k < net.n_cells(); ++k)
            if (k != cell)
                interference += net.p_ru(k) * net.gain(k, j) * rho[k];
        h.w.push_back((interference + net.sigma2()) / net.gain(cell, j));
        h.d.push_back(net.demand(j));
    }
    return h;
}

std::size_t bell(std::size_t n, std::size_t max_block)
{
    std::size_t count = 0;
    for_each_partition(n, max_block, [&](const Partition&) { ++count; });
    return count;
}

void expect_valid_solution(const NetworkModel& net, CellId cell, const CellSolution& s)
{
    std::multiset<UeId> seen;
    double sum = 0.0;
    for (std::size_t g = 0; g < s.groups.size(); ++g) {
        for (UeId j : s.groups[g].members)
            seen.insert(j);
        EXPECT_GE(s.x[g], 0.0);
        double power = 0.0;
        for (double q : s.q[g])
            power += q;
        EXPECT_LE(power, net.p_ru(cell) * (1.0 + 1e-9));
        sum += s.x[g];
    }
    const auto ues = net.ues_of(cell);
    EXPECT_EQ(seen, std::multiset<UeId>(ues.begin(), ues.end()));
    EXPECT_EQ(s.load, sum);
}

} // namespace

TEST(Partitions, CountsMatchBellAndRestrictedNumbers)
{
    EXPECT_EQ(bell(0, 3), 1u);
    EXPECT_EQ(bell(1, 1), 1u);
    EXPECT_EQ(bell(4, 4), 15u);  // Bell number B4
    EXPECT_EQ(bell(6, 6), 203u); // B6
    EXPECT_EQ(bell(4, 2), 10u);  // involutions of 4 elements
    EXPECT_EQ(bell(6, 2), 76u);
    EXPECT_EQ(bell(5, 1), 1u);
    EXPECT_THROW(bell(11, 2), std::invalid_argument);
}

TEST(Partitions, BlocksDisjointAndCovering)
{
    for_each_partition(7, 3, [](const Partition& p) {
        std::vector<int> hit(7, 0);
        for (const auto& b : p) {
            EXPECT_LE(b.size(), 3u);
            for (auto k : b)
                ++hit[k];
        }
        for (int h : hit)
            EXPECT_EQ(h, 1);
    });
    const std::vector<UeId> ids{4, 9, 11};
    EXPECT_EQ(enumerate_partitions(ids, 3).size(), 5u);
}

TEST(GroupingPolicy, ParseAndValidate)
{
    EXPECT_EQ(grouping_mode_from_string("noma"), GroupingPolicy::Mode::pairs);
    EXPECT_EQ(grouping_mode_from_string("oma"), GroupingPolicy::Mode::oma);
    EXPECT_THROW(grouping_mode_from_string("triples"), std::invalid_argument);
    EXPECT_THROW(GroupingPolicy::exhaustive(0).validate(), std::invalid_argument);
}

TEST(SolveCell, OmaIsSumOfSingletonOracle)
{
    const auto net = synthetic_network(3, 3);
    const LoadVector rho(std::vector<double>{0.2, 0.7, 0.4});
    for (CellId c = 0; c < 3; ++c) {
        const auto h = hand_cell(net, c, rho);
        long double want = 0.0L;
        for (std::size_t k = 0; k < h.w.size(); ++k)
            want += h.block({k});
        const auto s = solve_cell(net, c, rho, GroupingPolicy::oma());
        expect_valid_solution(net, c, s);
        EXPECT_NEAR(s.load, static_cast<double>(want), 1e-12 * static_cast<double>(want));
    }
}

TEST(SolveCell, ExhaustiveMatchesPartitionOracle)
{
    SyntheticOptions so;
    so.min_ues = 1;
    so.max_ues = 7;
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 40; ++t) {
        const auto net = synthetic_network(500 + t, 2, so);
        const LoadVector rho(std::vector<double>{u(rng), u(rng)});
        const std::size_t cap = 1 + t % 4;
        const auto h = hand_cell(net, 0, rho);
        const long double want =
            oracle::best_partition(h.w.size(), cap, [&](const std::vector<std::size_t>& b) { return h.block(b); });
        const auto s = solve_cell(net, 0, rho, GroupingPolicy::exhaustive(cap));
        expect_valid_solution(net, 0, s);
        EXPECT_NEAR(s.load, static_cast<double>(want), 1e-11 * static_cast<double>(want)) << "trial " << t;
        for (const auto& g : s.groups)
            EXPECT_LE(g.members.size(), cap);
    }
}

TEST(SolveCell, PairsEqualExhaustiveWithPairCap)
{
    SyntheticOptions so;
    so.min_ues = 2;
    so.max_ues = 8;
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 60; ++t) {
        const auto net = synthetic_network(900 + t, 3, so);
        const LoadVector rho(std::vector<double>{u(rng), u(rng), u(rng)});
        const CellId c = t % 3;
        const auto paired = solve_cell(net, c, rho, GroupingPolicy::pairs());
        const auto brute = solve_cell(net, c, rho, GroupingPolicy::exhaustive(2));
        expect_valid_solution(net, c, paired);
        EXPECT_EQ(paired.load, brute.load) << "trial " << t;
    }
}

TEST(SolveCell, GroupsFollowDecodingOrder)
{
    const auto net = synthetic_network(77, 3);
    const LoadVector rho(std::vector<double>{0.5, 0.5, 0.5});
    const auto s = solve_cell(net, 1, rho, GroupingPolicy::pairs());
    for (const auto& g : s.groups) {
        for (std::size_t k = 1; k < g.members.size(); ++k) {
            const double a = effective_noise(net, rho, g.members[k - 1]);
            const double b = effective_noise(net, rho, g.members[k]);
            EXPECT_TRUE(a < b || (a == b && g.members[k - 1] < g.members[k]));
        }
    }
}

TEST(SolveCell, FixedPolicyHonorsGroupsAndRejectsDuplicates)
{
    const NetworkModel net(1, {0, 0, 0}, {1.0, 0.5, 0.2}, {1.0}, 0.1, {0.1, 0.1, 0.1});
    const LoadVector rho = LoadVector::zeros(1);
    const auto s = solve_cell(net, 0, rho, GroupingPolicy::fixed({{2, 0}}));
    ASSERT_EQ(s.groups.size(), 2u);
    EXPECT_EQ(s.groups[0].members, (std::vector<UeId>{0, 2}));
    EXPECT_EQ(s.groups[1].members, (std::vector<UeId>{1}));
    EXPECT_THROW(solve_cell(net, 0, rho, GroupingPolicy::fixed({{0, 1}, {1, 2}})), std::invalid_argument);
}

TEST(SolveCell, PairsNeverWorseThanOma)
{
    for (int t = 0; t < 20; ++t) {
        const auto net = synthetic_network(40 + t, 4);
        const auto rho = LoadVector::filled(4, 0.6);
        for (CellId c = 0; c < 4; ++c)
            EXPECT_LE(solve_cell(net, c, rho, GroupingPolicy::pairs()).load,
                      solve_cell(net, c, rho, GroupingPolicy::oma()).load);
    }
}

TEST(SolveCell, RefusesLargeExhaustiveAndZeroDemandCell)
{
    SyntheticOptions so;
    so.min_ues = 11;
    so.max_ues = 11;
    const auto big = synthetic_network(1, 1, so);
    EXPECT_THROW(solve_cell(big, 0, LoadVector::zeros(1), GroupingPolicy::exhaustive(2)), std::invalid_argument);

    const NetworkModel idle(1, {0, 0}, {1.0, 2.0}, {1.0}, 0.1, {0.0, 0.0});
    EXPECT_EQ(solve_cell(idle, 0, LoadVector::zeros(1), GroupingPolicy::pairs()).load, 0.0);
}

TEST(OptimalPairing, HandInstance)
{
    // Pairing 0-1 saves 0.3, 2-3 saves 0.3, 1-2 saves 0.5: best is {0,1},{2,3} (0.6).
    const std::vector<double> s{1.0, 1.0, 1.0, 1.0};
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> pair(4, std::vector<double>(4, inf));
    pair[0][1] = pair[1][0] = 1.7;
    pair[2][3] = pair[3][2] = 1.7;
    pair[1][2] = pair[2][1] = 1.5;
    EXPECT_EQ(optimal_pairing(s, pair), (Partition{{0, 1}, {2, 3}}));
}
