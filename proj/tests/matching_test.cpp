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


#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include <noma/matching.hpp>

#include "test_support.hpp"

using namespace noma;

namespace {

std::int64_t matching_weight(const std::vector<int>& mate, const std::vector<std::vector<std::int64_t>>& w)
{
    std::int64_t total = 0;
    for (std::size_t v = 0; v < mate.size(); ++v) {
        if (mate[v] >= 0 && static_cast<std::size_t>(mate[v]) > v) {
            EXPECT_GE(w[v][mate[v]], 0) << "matched along a non-edge";
            total += w[v][mate[v]];
        }
    }
    return total;
}

void expect_consistent(const std::vector<int>& mate)
{
    for (std::size_t v = 0; v < mate.size(); ++v)
        if (mate[v] >= 0) {
            EXPECT_EQ(mate[mate[v]], static_cast<int>(v));
        }
}

} // namespace

TEST(Matching, EmptyAndTrivial)
{
    EXPECT_TRUE(max_weight_matching(0, {}).empty());
    EXPECT_EQ(max_weight_matching(3, {}), (std::vector<int>{-1, -1, -1}));
    EXPECT_EQ(max_weight_matching(2, {{0, 1, 5}}), (std::vector<int>{1, 0}));
    EXPECT_THROW(max_weight_matching(2, {{0, 1, -1}}), std::invalid_argument);
}

TEST(Matching, PrefersWeightOverCardinality)
{
    // Path 0-1-2-3 with heavy middle edge.
    const auto mate = max_weight_matching(4, {{0, 1, 2}, {1, 2, 10}, {2, 3, 2}});
    EXPECT_EQ(mate, (std::vector<int>{-1, 2, 1, -1}));
}

TEST(Matching, OddCycleNeedsBlossom)
{
    // Triangle 0-1-2 plus pendant 2-3: best is {0,1},{2,3}.
    const auto mate = max_weight_matching(4, {{0, 1, 6}, {1, 2, 5}, {0, 2, 5}, {2, 3, 4}});
    EXPECT_EQ(mate, (std::vector<int>{1, 0, 3, 2}));
}

TEST(Matching, AgreesWithBruteForceOnRandomGraphs)
{
    std::mt19937_64 rng(2024);
    for (int t = 0; t < 600; ++t) {
        const std::size_t n = 1 + t % 12;
        std::uniform_int_distribution<std::int64_t> weight(0, t % 3 == 0 ? 5 : 1000000);
        std::bernoulli_distribution present(t % 2 ? 0.4 : 0.9);
        std::vector<std::vector<std::int64_t>> w(n, std::vector<std::int64_t>(n, -1));
        std::vector<WeightedEdge> edges;
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = a + 1; b < n; ++b) {
                if (!present(rng))
                    continue;
                const auto x = weight(rng);
                w[a][b] = w[b][a] = x;
                edges.push_back({static_cast<int>(a), static_cast<int>(b), x});
            }
        }
        const auto mate = max_weight_matching(static_cast<int>(n), edges);
        ASSERT_EQ(mate.size(), n);
        expect_consistent(mate);
        EXPECT_EQ(matching_weight(mate, w), oracle::best_matching_weight(n, w)) << "trial " << t;
    }
}

TEST(Matching, LargeWeightsNearQuantizationScale)
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 2 + t % 9;
        std::vector<double> real;
        for (std::size_t k = 0; k < n * n; ++k)
            real.push_back(u(rng) * 0.3);
        double max_w = 0.0;
        for (double r : real)
            max_w = std::max(max_w, r);
        const double scale = quantization_scale(max_w);
        EXPECT_LE(max_w * scale, std::ldexp(1.0, 53));
        EXPECT_GE(max_w * scale, std::ldexp(1.0, 51));
        std::vector<std::vector<std::int64_t>> w(n, std::vector<std::int64_t>(n, -1));
        std::vector<WeightedEdge> edges;
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = a + 1; b < n; ++b) {
                const auto x = static_cast<std::int64_t>(std::llround(real[a * n + b] * scale));
                w[a][b] = w[b][a] = x;
                edges.push_back({static_cast<int>(a), static_cast<int>(b), x});
            }
        }
        const auto mate = max_weight_matching(static_cast<int>(n), edges);
        EXPECT_EQ(matching_weight(mate, w), oracle::best_matching_weight(n, w));
    }
}
