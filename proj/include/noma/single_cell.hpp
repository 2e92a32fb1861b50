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
 * \file noma/single_cell.hpp
 *
 * \brief Minimum load of one cell for fixed loads of the other cells:
 *  f_i(rho_{-i}), with the decoding order and the user grouping recomputed
 *  from the current interference on every call.
 */

#ifndef NOMA_SINGLE_CELL_HPP
#define NOMA_SINGLE_CELL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <noma/matching.hpp>
#include <noma/model.hpp>
#include <noma/rate_region.hpp>

namespace noma {

/// Blocks of indices; each block is one group.
using Partition = std::vector<std::vector<std::size_t>>;

inline constexpr std::size_t kMaxExhaustiveUes = 10;

/// Which user groupings the cell solver searches over.
struct GroupingPolicy
{
    enum class Mode { oma, fixed, pairs, exhaustive };

    Mode mode = Mode::pairs;
    std::size_t max_group_size = 2;
    /// Groups (global UE ids) used in fixed mode; uncovered UEs stay alone.
    std::vector<std::vector<UeId>> fixed_groups;

    static GroupingPolicy oma() { return {Mode::oma, 1, {}}; }
    static GroupingPolicy pairs() { return {Mode::pairs, 2, {}}; }
    static GroupingPolicy exhaustive(std::size_t max_group_size) { return {Mode::exhaustive, max_group_size, {}}; }
    static GroupingPolicy fixed(std::vector<std::vector<UeId>> groups)
    {
        std::size_t largest = 1;
        for (const auto& g : groups)
            largest = std::max(largest, g.size());
        return {Mode::fixed, largest, std::move(groups)};
    }

    void validate() const
    {
        if (max_group_size < 1)
            throw std::invalid_argument("GroupingPolicy: max_group_size must be >= 1");
        if (mode == Mode::pairs && max_group_size != 2)
            throw std::invalid_argument("GroupingPolicy: pairs mode requires max_group_size == 2");
    }
};

inline std::string to_string(GroupingPolicy::Mode m)
{
    switch (m) {
    case GroupingPolicy::Mode::oma: return "oma";
    case GroupingPolicy::Mode::fixed: return "fixed";
    case GroupingPolicy::Mode::pairs: return "pairs";
    case GroupingPolicy::Mode::exhaustive: return "exhaustive";
    }
    return "?";
}

inline GroupingPolicy::Mode grouping_mode_from_string(const std::string& s)
{
    if (s == "oma") return GroupingPolicy::Mode::oma;
    if (s == "fixed") return GroupingPolicy::Mode::fixed;
    if (s == "pairs" || s == "noma") return GroupingPolicy::Mode::pairs;
    if (s == "exhaustive") return GroupingPolicy::Mode::exhaustive;
    throw std::invalid_argument("unknown grouping policy: " + s);
}

// ---- partitions -------------------------------------------------------------

/**
 * Calls `visit` once for every set partition of {0, .., n-1} whose blocks
 * have at most `max_block` elements. Blocks are ordered by their smallest
 * element and list elements ascending.
 */
inline void for_each_partition(std::size_t n, std::size_t max_block,
                               const std::function<void(const Partition&)>& visit)
{
    if (n > kMaxExhaustiveUes)
        throw std::invalid_argument("for_each_partition: at most 10 elements supported");
    if (max_block < 1)
        throw std::invalid_argument("for_each_partition: max_block must be >= 1");
    if (n == 0) {
        visit(Partition{});
        return;
    }
    Partition blocks;
    std::function<void(std::size_t)> place = [&](std::size_t e) {
        if (e == n) {
            visit(blocks);
            return;
        }
        // Index, not reference: the recursion below may reallocate `blocks`.
        const std::size_t open = blocks.size();
        for (std::size_t k = 0; k < open; ++k) {
            if (blocks[k].size() < max_block) {
                blocks[k].push_back(e);
                place(e + 1);
                blocks[k].pop_back();
            }
        }
        blocks.push_back({e});
        place(e + 1);
        blocks.pop_back();
    };
    place(0);
}

/// All partitions of `ues` with blocks of at most `max_block` members.
inline std::vector<std::vector<std::vector<UeId>>> enumerate_partitions(std::span<const UeId> ues,
                                                                        std::size_t max_block)
{
    if (ues.size() > kMaxExhaustiveUes)
        throw std::invalid_argument("enumerate_partitions: at most 10 UEs supported");
    std::vector<std::vector<std::vector<UeId>>> out;
    for_each_partition(ues.size(), max_block, [&](const Partition& p) {
        std::vector<std::vector<UeId>> mapped;
        mapped.reserve(p.size());
        for (const auto& b : p) {
            std::vector<UeId> block;
            for (std::size_t k : b)
                block.push_back(ues[k]);
            mapped.push_back(std::move(block));
        }
        out.push_back(std::move(mapped));
    });
    return out;
}

// ---- pairing ------------------------------------------------------------------

/**
 * Partition of n UEs into pairs and singletons minimizing total load, given
 * singleton loads `s` and pair loads `pair[h][j]` (h != j). Solved exactly as
 * a maximum-weight matching with edge weights max(0, s_h + s_j - pair_hj).
 * Blocks come back ordered by smallest index.
 */
inline Partition optimal_pairing(std::span<const double> s, const std::vector<std::vector<double>>& pair)
{
    const std::size_t n = s.size();
    if (pair.size() != n)
        throw std::invalid_argument("optimal_pairing: pair load matrix must be n x n");

    struct Saving { std::size_t h, j; double value; };
    std::vector<Saving> savings;
    double max_saving = 0.0;
    for (std::size_t h = 0; h < n; ++h) {
        if (pair[h].size() != n)
            throw std::invalid_argument("optimal_pairing: pair load matrix must be n x n");
        for (std::size_t j = h + 1; j < n; ++j) {
            const double saving = s[h] + s[j] - pair[h][j];
            if (saving > 0.0 && std::isfinite(saving)) {
                savings.push_back({h, j, saving});
                max_saving = std::max(max_saving, saving);
            }
        }
    }

    const double scale = quantization_scale(max_saving);
    std::vector<WeightedEdge> edges;
    for (const auto& sv : savings) {
        const auto wq = static_cast<std::int64_t>(std::llround(sv.value * scale));
        if (wq > 0)
            edges.push_back({static_cast<int>(sv.h), static_cast<int>(sv.j), wq});
    }
    const auto mate = max_weight_matching(static_cast<int>(n), std::move(edges));

    Partition blocks;
    for (std::size_t v = 0; v < n; ++v) {
        const int m = mate.empty() ? -1 : mate[v];
        if (m < 0)
            blocks.push_back({v});
        else if (static_cast<std::size_t>(m) > v)
            blocks.push_back({v, static_cast<std::size_t>(m)});
    }
    return blocks;
}

/// Sum of block loads in block order; the common reduction used everywhere a
/// grouping's total load is reported.
inline double partition_load(const Partition& p, const std::function<double(const std::vector<std::size_t>&)>& block_load)
{
    double total = 0.0;
    for (const auto& b : p)
        total += block_load(b);
    return total;
}

// ---- cell solver ----------------------------------------------------------------

namespace detail {

/// Per-cell data for one evaluation of f_i.
class CellContext
{
public:
    CellContext(const NetworkModel& net, CellId cell, const LoadVector& rho, const GroupLoadOptions& opt)
        : net_(net), cell_(cell), members_(net.ues_of(cell)), opt_(opt)
    {
        w_ = cell_effective_noise(net, rho, cell);
        d_.reserve(members_.size());
        for (UeId j : members_)
            d_.push_back(net.demand(j));
    }

    std::size_t size() const noexcept { return members_.size(); }
    std::span<const UeId> members() const noexcept { return members_; }
    double demand(std::size_t k) const { return d_[k]; }

    struct Evaluated
    {
        Group group;
        GroupLoad load;
    };

    /// Group of local indices evaluated in its NOMA order.
    Evaluated evaluate(const std::vector<std::size_t>& block) const
    {
        std::vector<double> wb;
        std::vector<UeId> ids;
        for (std::size_t k : block) {
            wb.push_back(w_[k]);
            ids.push_back(members_[k]);
        }
        Group g = decoding_order(wb, ids);
        std::vector<double> wo, dord;
        for (UeId id : g.members) {
            const std::size_t k = local_index(id);
            wo.push_back(w_[k]);
            dord.push_back(d_[k]);
        }
        return {std::move(g), min_group_load(wo, dord, net_.p_ru(cell_), opt_)};
    }

    std::size_t local_index(UeId id) const
    {
        const auto it = std::lower_bound(members_.begin(), members_.end(), id);
        if (it == members_.end() || *it != id)
            throw std::invalid_argument("UE " + std::to_string(id) + " is not served by cell " +
                                        std::to_string(cell_));
        return static_cast<std::size_t>(it - members_.begin());
    }

    CellSolution assemble(const Partition& blocks) const
    {
        CellSolution sol;
        sol.cell = cell_;
        for (const auto& b : blocks) {
            auto ev = evaluate(b);
            sol.groups.push_back(std::move(ev.group));
            sol.x.push_back(ev.load.x);
            sol.q.push_back(std::move(ev.load.q));
        }
        for (double x : sol.x)
            sol.load += x;
        return sol;
    }

private:
    const NetworkModel& net_;
    CellId cell_;
    std::span<const UeId> members_;
    GroupLoadOptions opt_;
    std::vector<double> w_;
    std::vector<double> d_;
};

inline Partition singletons(std::size_t n)
{
    Partition p;
    for (std::size_t k = 0; k < n; ++k)
        p.push_back({k});
    return p;
}

inline void sort_blocks(Partition& p)
{
    for (auto& b : p)
        std::sort(b.begin(), b.end());
    std::sort(p.begin(), p.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

} // namespace detail

/**
 * Evaluates f_i: the minimum load of `cell` given the loads `rho` of all
 * cells (the cell's own entry is ignored). Always feasible; the result may
 * exceed the load limit.
 */
inline CellSolution solve_cell(const NetworkModel& net,
                               CellId cell,
                               const LoadVector& rho,
                               const GroupingPolicy& policy,
                               const GroupLoadOptions& opt = {})
{
    policy.validate();
    if (cell >= net.n_cells())
        throw std::invalid_argument("solve_cell: cell index out of range");
    const detail::CellContext ctx(net, cell, rho, opt);
    const std::size_t n = ctx.size();

    switch (policy.mode) {
    case GroupingPolicy::Mode::oma:
        return ctx.assemble(detail::singletons(n));

    case GroupingPolicy::Mode::fixed: {
        Partition blocks;
        std::vector<bool> covered(n, false);
        for (const auto& g : policy.fixed_groups) {
            if (g.empty())
                throw std::invalid_argument("fixed grouping: empty group");
            if (net.home(g.front()) != cell)
                continue;
            std::vector<std::size_t> block;
            for (UeId id : g) {
                const std::size_t k = ctx.local_index(id);
                if (covered[k])
                    throw std::invalid_argument("fixed grouping: UE " + std::to_string(id) +
                                                " appears in more than one group");
                covered[k] = true;
                block.push_back(k);
            }
            blocks.push_back(std::move(block));
        }
        for (std::size_t k = 0; k < n; ++k)
            if (!covered[k])
                blocks.push_back({k});
        detail::sort_blocks(blocks);
        return ctx.assemble(blocks);
    }

    case GroupingPolicy::Mode::pairs: {
        std::vector<double> s(n);
        for (std::size_t k = 0; k < n; ++k)
            s[k] = ctx.evaluate({k}).load.x;
        std::vector<std::vector<double>> pair(n, std::vector<double>(n, std::numeric_limits<double>::infinity()));
        for (std::size_t h = 0; h < n; ++h) {
            for (std::size_t j = h + 1; j < n; ++j) {
                // A zero-demand member never reduces the pair's load.
                if (ctx.demand(h) == 0.0 || ctx.demand(j) == 0.0)
                    continue;
                pair[h][j] = pair[j][h] = ctx.evaluate({h, j}).load.x;
            }
        }
        return ctx.assemble(optimal_pairing(s, pair));
    }

    case GroupingPolicy::Mode::exhaustive: {
        if (n > kMaxExhaustiveUes)
            throw std::invalid_argument("exhaustive grouping refuses cells with more than 10 UEs");
        std::unordered_map<std::uint32_t, double> cache;
        auto block_load = [&](const std::vector<std::size_t>& b) {
            std::uint32_t key = 0;
            for (std::size_t k : b)
                key |= std::uint32_t{1} << k;
            auto it = cache.find(key);
            if (it == cache.end())
                it = cache.emplace(key, ctx.evaluate(b).load.x).first;
            return it->second;
        };
        Partition best;
        double best_load = std::numeric_limits<double>::infinity();
        for_each_partition(n, policy.max_group_size, [&](const Partition& p) {
            const double total = partition_load(p, block_load);
            if (total < best_load) {
                best_load = total;
                best = p;
            }
        });
        return ctx.assemble(best);
    }
    }
    throw std::logic_error("solve_cell: unhandled grouping mode");
}

} // namespace noma

#endif // NOMA_SINGLE_CELL_HPP
