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
 * \file noma/rate_region.hpp
 *
 * \brief Power needed by a superposition-coded group to carry given per-RU
 *  rates under a given SIC order, and the per-group minimum RU share.
 *
 * Positions are 0-based here: position 0 is decoded by every later member
 * and sees no intra-group interference.
 */

#ifndef NOMA_RATE_REGION_HPP
#define NOMA_RATE_REGION_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include <boost/math/tools/toms748_solve.hpp>

#include <nlohmann/json.hpp>

namespace noma {

/// Largest exponent (nats) evaluated before reporting overflow.
inline constexpr double kDefaultExponentCap = 700.0;

namespace detail {

inline void check_rate_inputs(std::span<const double> w, std::span<const double> c)
{
    if (w.empty() || w.size() != c.size())
        throw std::invalid_argument("rate region: need K >= 1 and one rate per member");
    for (std::size_t t = 0; t < w.size(); ++t) {
        if (!(w[t] > 0.0) || !std::isfinite(w[t]))
            throw std::invalid_argument("rate region: effective noise must be positive and finite");
        if (!(c[t] >= 0.0))
            throw std::invalid_argument("rate region: rates must be >= 0");
    }
}

} // namespace detail

/**
 * Total power sum_t (w_t - w_{t-1}) e^{sum_{k>=t} c_k} - w_K, with w_0 = 0,
 * for members listed in decoding position order. Evaluated in the
 * equivalent expm1 form so that small rates keep full relative precision.
 *
 * Returns std::nullopt when the largest exponent exceeds `exponent_cap`.
 */
namespace detail {

/// Sum over t of (w_t - w_{t-1}) expm1(c_t + ... + c_{K-1}), accumulated from the back.
inline std::optional<double> required_power_unchecked(std::span<const double> w, std::span<const double> c,
                                                      double exponent_cap)
{
    const std::size_t K = w.size();
    double tail = 0.0;
    double total = 0.0;
    for (std::size_t t = K; t-- > 0;) {
        tail += c[t];
        total += (w[t] - (t > 0 ? w[t - 1] : 0.0)) * std::expm1(tail);
    }
    if (!(tail <= exponent_cap))
        return std::nullopt;
    return total;
}

} // namespace detail

inline std::optional<double> required_power(std::span<const double> w,
                                             std::span<const double> c,
                                             double exponent_cap = kDefaultExponentCap)
{
    detail::check_rate_inputs(w, c);
    return detail::required_power_unchecked(w, c, exponent_cap);
}

/**
 * Successive power split: q_0 = w_0 (e^{c_0} - 1) and
 * q_t = (sum_{h<t} q_h + w_t)(e^{c_t} - 1).
 */
inline std::optional<std::vector<double>> recover_power_split(std::span<const double> w,
                                                              std::span<const double> c,
                                                              double exponent_cap = kDefaultExponentCap)
{
    detail::check_rate_inputs(w, c);
    double total_rate = 0.0;
    for (double ck : c)
        total_rate += ck;
    if (!(total_rate <= exponent_cap))
        return std::nullopt;

    std::vector<double> q(w.size());
    double above = 0.0;
    for (std::size_t t = 0; t < w.size(); ++t) {
        q[t] = (above + w[t]) * std::expm1(c[t]);
        above += q[t];
    }
    return q;
}

// ---- exhaustive order check ------------------------------------------------

struct PermutationPower
{
    std::vector<std::size_t> order;       ///< member indices, position 0 first
    std::optional<double> power;          ///< nullopt on exponent overflow
};

/// Outcome of comparing the NOMA order against every permutation of a group.
struct OrderOptimalityReport
{
    std::vector<double> w;
    std::vector<double> c;
    std::vector<PermutationPower> table;
    std::vector<std::size_t> noma_order;
    double noma_power = 0.0;
    double min_power = 0.0;
    std::size_t ties = 0; ///< other permutations matching noma_power within rel_tol
    bool holds = true;
    std::optional<std::vector<std::size_t>> violation;
};

/// Ascending w, ties by member index.
inline std::vector<std::size_t> noma_order(std::span<const double> w)
{
    std::vector<std::size_t> idx(w.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return w[a] < w[b]; });
    return idx;
}

/**
 * Enumerates all K! decoding orders of one group and checks that the NOMA
 * order needs the least power. `w[k]` and `c[k]` belong to member k.
 * Comparisons allow a relative slack of `rel_tol` for rounding.
 */
inline OrderOptimalityReport verify_theorem1(std::span<const double> w,
                                             std::span<const double> c,
                                             std::size_t max_members = 7,
                                             double rel_tol = 1e-12)
{
    detail::check_rate_inputs(w, c);
    if (w.size() > max_members)
        throw std::invalid_argument("verify_theorem1: group exceeds the brute-force cap");

    const std::size_t K = w.size();
    OrderOptimalityReport rep;
    rep.w.assign(w.begin(), w.end());
    rep.c.assign(c.begin(), c.end());
    rep.noma_order = noma_order(w);

    auto power_of = [&](const std::vector<std::size_t>& order) {
        std::vector<double> wp(K), cp(K);
        for (std::size_t t = 0; t < K; ++t) {
            wp[t] = w[order[t]];
            cp[t] = c[order[t]];
        }
        return required_power(wp, cp);
    };

    const auto star = power_of(rep.noma_order);
    rep.noma_power = star.value_or(std::numeric_limits<double>::infinity());
    rep.min_power = rep.noma_power;

    std::vector<std::size_t> perm(K);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    do {
        PermutationPower row{perm, power_of(perm)};
        const double value = row.power.value_or(std::numeric_limits<double>::infinity());
        rep.min_power = std::min(rep.min_power, value);
        if (perm != rep.noma_order) {
            const double slack = rel_tol * std::abs(rep.noma_power);
            if (value < rep.noma_power - slack) {
                rep.holds = false;
                if (!rep.violation)
                    rep.violation = perm;
            } else if (value <= rep.noma_power + slack) {
                ++rep.ties;
            }
        }
        rep.table.push_back(std::move(row));
    } while (std::next_permutation(perm.begin(), perm.end()));
    return rep;
}

inline nlohmann::json to_json(const OrderOptimalityReport& rep)
{
    nlohmann::json table = nlohmann::json::array();
    for (const auto& row : rep.table) {
        nlohmann::json power = nullptr;
        if (row.power)
            power = *row.power;
        table.push_back({{"order", row.order}, {"power", power}});
    }
    nlohmann::json out = {
        {"w", rep.w},
        {"c", rep.c},
        {"noma_order", rep.noma_order},
        {"noma_power", rep.noma_power},
        {"min_power", rep.min_power},
        {"ties", rep.ties},
        {"holds", rep.holds},
        {"table", table},
    };
    out["violation"] = rep.violation ? nlohmann::json(*rep.violation) : nlohmann::json(nullptr);
    return out;
}

// ---- per-group minimum load -----------------------------------------------

struct GroupLoad
{
    double x = 0.0;         ///< RU fraction
    std::vector<double> q;  ///< power split in position order
};

struct GroupLoadOptions
{
    double rel_tol = 1e-14; ///< bisection root bracket stops once (hi - lo) <= rel_tol * hi
    double exponent_cap = kDefaultExponentCap;
};

/**
 * Smallest RU fraction x such that the group can deliver demands `d` with
 * per-RU power budget `p`, i.e. required_power(w, d / x) <= p. Members are
 * taken in the given position order (the NOMA order when called from the
 * cell solver). Demands are met with equality.
 */
inline GroupLoad min_group_load(std::span<const double> w,
                                std::span<const double> d,
                                double p,
                                const GroupLoadOptions& opt = {})
{
    detail::check_rate_inputs(w, d);
    if (!(p > 0.0) || !std::isfinite(p))
        throw std::invalid_argument("min_group_load: power budget must be positive");
    const std::size_t K = w.size();

    if (std::all_of(d.begin(), d.end(), [](double v) { return v == 0.0; }))
        return {0.0, std::vector<double>(K, 0.0)};

    std::vector<double> rates(K);
    auto rates_at = [&](double x) {
        for (std::size_t t = 0; t < K; ++t)
            rates[t] = d[t] / x;
        return std::span<const double>(rates);
    };
    auto excess = [&](double x) -> std::optional<double> {
        const auto r = detail::required_power_unchecked(w, rates_at(x), opt.exponent_cap);
        if (!r)
            return std::nullopt;
        return *r - p;
    };
    auto feasible = [&](double x) {
        const auto e = excess(x);
        return e && *e <= 0.0;
    };

    // Every member alone needs at least d_j / ln(1 + p / w_j); the largest such
    // bound is infeasible (or exactly feasible) for the whole group.
    double lo = 0.0;
    double w_sum = 0.0;
    double d_max = 0.0;
    for (std::size_t t = 0; t < K; ++t) {
        w_sum += w[t];
        d_max = std::max(d_max, d[t]);
        if (d[t] > 0.0)
            lo = std::max(lo, d[t] / std::log1p(p / w[t]));
    }

    if (K == 1) {
        const double x = lo;
        const auto q = recover_power_split(w, rates_at(x), opt.exponent_cap);
        return {x, q.value_or(std::vector<double>{p})};
    }
    if (feasible(lo))
        return {lo, *recover_power_split(w, rates_at(lo), opt.exponent_cap)};

    double hi = std::max(d_max / std::log1p(p / w_sum), lo);
    while (!feasible(hi)) {
        lo = hi;
        hi *= 2.0;
    }
    auto done = [&](double a, double b) { return b - a <= opt.rel_tol * b; };

    // Halve until the lower end leaves the exponent-cap region, so the
    // bracketing solver below only sees finite values.
    std::optional<double> e_lo = excess(lo);
    while (!e_lo && !done(lo, hi)) {
        const double mid = lo + 0.5 * (hi - lo);
        const auto e = excess(mid);
        if (e && *e <= 0.0) {
            hi = mid;
        } else {
            lo = mid;
            e_lo = e;
        }
    }
    if (e_lo && !done(lo, hi)) {
        const double e_hi = *excess(hi);
        if (e_hi == 0.0)
            return {hi, *recover_power_split(w, rates_at(hi), opt.exponent_cap)};
        // Safeguarded bracketing (TOMS 748): keeps [lo, hi] with excess(lo) > 0 >= excess(hi).
        std::uintmax_t max_iter = 200;
        const auto bracket = boost::math::tools::toms748_solve([&](double x) { return *excess(x); }, lo, hi, *e_lo,
                                                               e_hi, done, max_iter);
        lo = bracket.first;
        hi = bracket.second;
        if (!feasible(hi)) {
            // The solver reports its bracket; guard against a rounding-level sign slip.
            while (!feasible(hi))
                hi = std::nextafter(hi, std::numeric_limits<double>::infinity());
        }
    }
    return {hi, *recover_power_split(w, rates_at(hi), opt.exponent_cap)};
}

} // namespace noma

#endif // NOMA_RATE_REGION_HPP
