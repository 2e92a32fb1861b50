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


#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include <noma/model.hpp>

using namespace noma;

namespace {

// Two cells, one UE in each. Gains row-major [cell][ue].
NetworkModel two_by_two(double sigma2 = 0.01)
{
    return NetworkModel(2, {0, 1}, {1.0, 0.5, 0.1, 2.0}, {1.0, 1.0}, sigma2, {0.1, 0.1});
}

} // namespace

TEST(EffectiveNoise, ZeroLoadIsNoiseOverGain)
{
    const auto net = two_by_two();
    EXPECT_DOUBLE_EQ(effective_noise(net, LoadVector::zeros(2), 0), 0.01 / 1.0);
    EXPECT_DOUBLE_EQ(effective_noise(net, LoadVector::zeros(2), 1), 0.01 / 2.0);
}

TEST(EffectiveNoise, HandEvaluatedInterference)
{
    // UE 0 lives in cell 0 with gain 1; cell 1 reaches it with gain 0.1 at load 0.5.
    const auto net = two_by_two();
    const LoadVector rho(std::vector<double>{0.0, 0.5});
    EXPECT_NEAR(effective_noise(net, rho, 0), (1.0 * 0.1 * 0.5 + 0.01) / 1.0, 1e-15);
    EXPECT_NEAR(effective_noise(net, rho, 0), 0.06, 1e-15);
}

TEST(EffectiveNoise, LinearInLoadWithoutNoise)
{
    const NetworkModel net(2, {0, 1}, {1.0, 0.5, 0.1, 2.0}, {1.0, 1.0}, 1e-300, {0.1, 0.1});
    const double a = effective_noise(net, LoadVector(std::vector<double>{0.0, 0.3}), 0);
    const double b = effective_noise(net, LoadVector(std::vector<double>{0.0, 0.6}), 0);
    EXPECT_NEAR(b, 2.0 * a, 1e-15 * b);
}

TEST(EffectiveNoise, NonDecreasingUnderRandomPerturbation)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t cells = 4, ues = 8;
    std::vector<double> gain(cells * ues);
    for (double& g : gain)
        g = 0.01 + u(rng);
    std::vector<CellId> home{0, 0, 1, 1, 2, 2, 3, 3};
    const NetworkModel net(cells, home, gain, {1.0, 2.0, 0.5, 1.5}, 0.05, std::vector<double>(ues, 0.1));
    for (int t = 0; t < 500; ++t) {
        std::vector<double> lo(cells), hi(cells);
        for (std::size_t i = 0; i < cells; ++i) {
            lo[i] = 2.0 * u(rng);
            hi[i] = lo[i] + (u(rng) < 0.5 ? 0.0 : u(rng));
        }
        for (UeId j = 0; j < ues; ++j)
            EXPECT_LE(effective_noise(net, LoadVector(lo), j), effective_noise(net, LoadVector(hi), j));
    }
}

TEST(DecodingOrder, AscendingWithIdTieBreak)
{
    const std::vector<double> w1{2.0, 1.0};
    const std::vector<UeId> m1{4, 9};
    EXPECT_EQ(decoding_order(w1, m1).members, (std::vector<UeId>{9, 4}));

    const std::vector<double> w2{1.0, 1.0};
    const std::vector<UeId> m2{7, 3};
    EXPECT_EQ(decoding_order(w2, m2).members, (std::vector<UeId>{3, 7}));

    const std::vector<double> w3{3.0, 1.0, 2.0};
    const std::vector<UeId> m3{0, 1, 2};
    EXPECT_EQ(decoding_order(w3, m3).members, (std::vector<UeId>{1, 2, 0}));
}

TEST(DecodingOrder, InputPermutationDoesNotMatter)
{
    std::vector<std::pair<double, UeId>> items{{2.0, 5}, {1.0, 8}, {2.0, 1}, {0.5, 3}, {1.0, 2}};
    std::vector<UeId> first;
    std::mt19937 rng(3);
    for (int t = 0; t < 50; ++t) {
        std::shuffle(items.begin(), items.end(), rng);
        std::vector<double> w;
        std::vector<UeId> ids;
        for (auto [wv, id] : items) {
            w.push_back(wv);
            ids.push_back(id);
        }
        const auto g = decoding_order(w, ids);
        if (first.empty())
            first = g.members;
        EXPECT_EQ(g.members, first);
    }
    EXPECT_EQ(first, (std::vector<UeId>{3, 2, 8, 1, 5}));
}

TEST(Capacity, HandValues)
{
    const Group single{{0}};
    const std::vector<double> q1{1.0};
    EXPECT_DOUBLE_EQ(capacity(q1, 1.0, single, 0), std::numbers::ln2);

    // Member j decoded after h: h's power counts as interference.
    const Group pair{{4, 6}};
    const std::vector<double> q2{1.0, 3.0};
    EXPECT_DOUBLE_EQ(capacity(q2, 1.0, pair, 6), std::log(1.0 + 3.0 / 2.0));
    EXPECT_DOUBLE_EQ(capacity(q2, 1.0, pair, 4), std::log(1.0 + 1.0 / 1.0));

    const std::vector<double> q0{1.0, 0.0};
    EXPECT_EQ(capacity(q0, 1.0, pair, 6), 0.0);
}

TEST(Capacity, MonotoneInOwnPowerAndNoise)
{
    const Group pair{{0, 1}};
    for (double qj = 0.1; qj < 5.0; qj += 0.37) {
        const std::vector<double> a{0.7, qj}, b{0.7, qj * 1.01};
        EXPECT_LT(capacity(a, 0.5, pair, 1), capacity(b, 0.5, pair, 1));
        EXPECT_GT(capacity(a, 0.5, pair, 1), capacity(a, 0.5 * 1.01, pair, 1));
    }
}

TEST(NetworkModel, RejectsInvalidInput)
{
    EXPECT_THROW(NetworkModel(1, {0}, {0.0}, {1.0}, 0.1, {0.1}), std::invalid_argument);  // zero gain
    EXPECT_THROW(NetworkModel(1, {0}, {1.0}, {1.0}, 0.0, {0.1}), std::invalid_argument);  // sigma2
    EXPECT_THROW(NetworkModel(1, {0}, {1.0}, {0.0}, 0.1, {0.1}), std::invalid_argument);  // power
    EXPECT_THROW(NetworkModel(1, {0}, {1.0}, {1.0}, 0.1, {-0.1}), std::invalid_argument); // demand
    EXPECT_THROW(NetworkModel(1, {1}, {1.0}, {1.0}, 0.1, {0.1}), std::invalid_argument);  // home
    EXPECT_THROW(NetworkModel(1, {0}, {1.0}, {1.0}, 0.1, {0.1}, 1.5), std::invalid_argument);
    EXPECT_THROW(NetworkModel(1, {0}, {1.0}, {1.0}, 0.1, {0.1}, 0.0), std::invalid_argument);
    EXPECT_THROW(LoadVector(std::vector<double>{-1.0}), std::invalid_argument);
}

TEST(NetworkModel, UesOfCellAscending)
{
    const NetworkModel net(2, {1, 0, 1, 0}, std::vector<double>(8, 1.0), {1.0, 1.0}, 0.1,
                           std::vector<double>(4, 0.1));
    const auto c0 = net.ues_of(0), c1 = net.ues_of(1);
    EXPECT_EQ(std::vector<UeId>(c0.begin(), c0.end()), (std::vector<UeId>{1, 3}));
    EXPECT_EQ(std::vector<UeId>(c1.begin(), c1.end()), (std::vector<UeId>{0, 2}));
}

TEST(NetworkModel, JsonRoundTripLinearAndDb)
{
    const auto net = two_by_two();
    EXPECT_EQ(network_from_json(to_json(net)), net);
    const auto back = network_from_json(to_json(net, "db"));
    for (CellId i = 0; i < 2; ++i)
        for (UeId j = 0; j < 2; ++j)
            EXPECT_NEAR(back.gain(i, j), net.gain(i, j), 1e-12 * net.gain(i, j));

    auto j = to_json(net);
    j["p_ru"] = 3.0;
    EXPECT_EQ(network_from_json(j).p_ru(1), 3.0);
}
