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
 * \file noma/model.hpp
 *
 * \brief Network data model and the per-RU physical layer formulas of a
 *  multi-cell downlink with NOMA/SIC and load coupling.
 *
 * All quantities are linear (mW, dimensionless gains) and rates are in nats.
 * Conversions from dB/bits happen at the I/O boundary only.
 */

#ifndef NOMA_MODEL_HPP
#define NOMA_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace noma {

using CellId = std::size_t;
using UeId = std::size_t;

/// Per-cell load, i.e. the fraction of a cell's RUs in use. May exceed one
/// before the load limit is checked.
class LoadVector
{
public:
    LoadVector() = default;

    explicit LoadVector(std::vector<double> rho) : rho_(std::move(rho))
    {
        for (double r : rho_) {
            if (!std::isfinite(r) || r < 0.0)
                throw std::invalid_argument("LoadVector: entries must be finite and >= 0");
        }
    }

    static LoadVector zeros(std::size_t n) { return LoadVector(std::vector<double>(n, 0.0)); }
    static LoadVector filled(std::size_t n, double v) { return LoadVector(std::vector<double>(n, v)); }

    std::size_t size() const noexcept { return rho_.size(); }
    double operator[](std::size_t i) const { return rho_[i]; }
    std::span<const double> values() const noexcept { return rho_; }

    /// Replaces one entry; the value must satisfy the same invariant.
    void set(std::size_t i, double v)
    {
        if (!std::isfinite(v) || v < 0.0)
            throw std::invalid_argument("LoadVector: entries must be finite and >= 0");
        rho_.at(i) = v;
    }

    LoadVector scaled(double alpha) const
    {
        std::vector<double> out(rho_);
        for (double& r : out)
            r *= alpha;
        return LoadVector(std::move(out));
    }

    friend bool operator==(const LoadVector&, const LoadVector&) = default;

private:
    std::vector<double> rho_;
};

/// Sup-norm distance between two load vectors of equal size.
inline double sup_distance(const LoadVector& a, const LoadVector& b)
{
    if (a.size() != b.size())
        throw std::invalid_argument("sup_distance: size mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

/**
 * Immutable description of a multi-cell downlink: one flat gain per
 * (cell, UE) pair, per-RU transmit power per cell, per-RU noise and
 * per-UE demands normalized by the total bandwidth M*B (nats).
 */
class NetworkModel
{
public:
    NetworkModel(std::size_t n_cells,
                 std::vector<CellId> ue_home,
                 std::vector<double> gain, // row-major [cell][ue]
                 std::vector<double> p_ru,
                 double sigma2,
                 std::vector<double> demand,
                 double load_limit = 1.0)
        : n_cells_(n_cells),
          ue_home_(std::move(ue_home)),
          gain_(std::move(gain)),
          p_ru_(std::move(p_ru)),
          sigma2_(sigma2),
          demand_(std::move(demand)),
          load_limit_(load_limit)
    {
        validate();
        members_.assign(n_cells_, {});
        for (UeId j = 0; j < ue_home_.size(); ++j)
            members_[ue_home_[j]].push_back(j);
    }

    std::size_t n_cells() const noexcept { return n_cells_; }
    std::size_t n_ues() const noexcept { return ue_home_.size(); }
    CellId home(UeId j) const { return ue_home_.at(j); }
    double gain(CellId i, UeId j) const { return gain_[i * n_ues() + j]; }
    double p_ru(CellId i) const { return p_ru_.at(i); }
    double sigma2() const noexcept { return sigma2_; }
    double demand(UeId j) const { return demand_.at(j); }
    double load_limit() const noexcept { return load_limit_; }

    std::span<const UeId> ues_of(CellId i) const { return members_.at(i); }
    std::span<const CellId> ue_home() const noexcept { return ue_home_; }
    std::span<const double> gains() const noexcept { return gain_; }
    std::span<const double> p_ru_all() const noexcept { return p_ru_; }
    std::span<const double> demands() const noexcept { return demand_; }

    /// Copy with a different demand vector.
    NetworkModel with_demand(std::vector<double> demand) const
    {
        return NetworkModel(n_cells_, ue_home_, gain_, p_ru_, sigma2_, std::move(demand), load_limit_);
    }

    NetworkModel with_uniform_demand(double d) const
    {
        return with_demand(std::vector<double>(n_ues(), d));
    }

    NetworkModel with_load_limit(double limit) const
    {
        return NetworkModel(n_cells_, ue_home_, gain_, p_ru_, sigma2_, demand_, limit);
    }

    friend bool operator==(const NetworkModel& a, const NetworkModel& b)
    {
        return a.n_cells_ == b.n_cells_ && a.ue_home_ == b.ue_home_ && a.gain_ == b.gain_ &&
               a.p_ru_ == b.p_ru_ && a.sigma2_ == b.sigma2_ && a.demand_ == b.demand_ &&
               a.load_limit_ == b.load_limit_;
    }

private:
    void validate() const
    {
        auto fail = [](const std::string& what) { throw std::invalid_argument("NetworkModel: " + what); };
        if (n_cells_ == 0)
            fail("at least one cell required");
        if (gain_.size() != n_cells_ * ue_home_.size())
            fail("gain matrix must be n_cells x n_ues");
        if (p_ru_.size() != n_cells_)
            fail("p_ru must have one entry per cell");
        if (demand_.size() != ue_home_.size())
            fail("demand must have one entry per UE");
        for (CellId h : ue_home_)
            if (h >= n_cells_)
                fail("ue_home index out of range");
        for (double g : gain_)
            if (!(g > 0.0) || !std::isfinite(g))
                fail("gains must be positive and finite");
        for (double p : p_ru_)
            if (!(p > 0.0) || !std::isfinite(p))
                fail("p_ru must be positive and finite");
        if (!(sigma2_ > 0.0) || !std::isfinite(sigma2_))
            fail("sigma2 must be positive and finite");
        for (double d : demand_)
            if (!(d >= 0.0) || !std::isfinite(d))
                fail("demands must be finite and >= 0");
        if (!(load_limit_ > 0.0 && load_limit_ <= 1.0))
            fail("load_limit must lie in (0, 1]");
    }

    std::size_t n_cells_;
    std::vector<CellId> ue_home_;
    std::vector<double> gain_;
    std::vector<double> p_ru_;
    double sigma2_;
    std::vector<double> demand_;
    double load_limit_;
    std::vector<std::vector<UeId>> members_;
};

/// UEs sharing the same RUs. Members are stored in decoding order, strongest
/// (smallest effective noise) first; that order is the SIC indicator.
struct Group
{
    std::vector<UeId> members;

    std::size_t size() const noexcept { return members.size(); }
    friend bool operator==(const Group&, const Group&) = default;
};

/// Result of minimizing one cell's load for given inter-cell interference.
struct CellSolution
{
    CellId cell = 0;
    std::vector<Group> groups;
    std::vector<double> x;              ///< RU fraction per group
    std::vector<std::vector<double>> q; ///< power split per group, in member order (mW)
    double load = 0.0;                  ///< sum of x
};

/// Interference-plus-noise of UE `ue` normalized by its own gain:
/// (sum_{k != home} p_k g_k,ue rho_k + sigma2) / g_home,ue.
inline double effective_noise(const NetworkModel& net, const LoadVector& rho, UeId ue)
{
    if (rho.size() != net.n_cells())
        throw std::invalid_argument("effective_noise: load vector size mismatch");
    const CellId home = net.home(ue);
    double interference = 0.0;
    for (CellId k = 0; k < net.n_cells(); ++k) {
        if (k != home)
            interference += net.p_ru(k) * net.gain(k, ue) * rho[k];
    }
    return (interference + net.sigma2()) / net.gain(home, ue);
}

/// Effective noise of every UE of `cell`, in `net.ues_of(cell)` order.
inline std::vector<double> cell_effective_noise(const NetworkModel& net, const LoadVector& rho, CellId cell)
{
    std::vector<double> w;
    w.reserve(net.ues_of(cell).size());
    for (UeId j : net.ues_of(cell))
        w.push_back(effective_noise(net, rho, j));
    return w;
}

/**
 * SIC decoding order: ascending effective noise, ties broken by ascending UE
 * id. `w[k]` belongs to `members[k]`.
 */
inline Group decoding_order(std::span<const double> w, std::span<const UeId> members)
{
    if (members.empty() || w.size() != members.size())
        throw std::invalid_argument("decoding_order: need one w per member and at least one member");
    std::vector<std::size_t> idx(members.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (w[a] != w[b])
            return w[a] < w[b];
        return members[a] < members[b];
    });
    Group g;
    g.members.reserve(members.size());
    for (std::size_t k : idx)
        g.members.push_back(members[k]);
    return g;
}

/// Per-RU capacity (nats) of member `j` of `group` given the group's power
/// split `q` (member order) and `j`'s effective noise.
inline double capacity(std::span<const double> q, double w_j, const Group& group, UeId j)
{
    if (q.size() != group.size())
        throw std::invalid_argument("capacity: power split size mismatch");
    double interference = 0.0;
    for (std::size_t t = 0; t < group.size(); ++t) {
        if (group.members[t] == j)
            return std::log1p(q[t] / (interference + w_j));
        interference += q[t];
    }
    throw std::invalid_argument("capacity: UE is not a member of the group");
}

// ---- JSON ---------------------------------------------------------------

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

/// Serializes with linear gains; `gain_unit` is "linear" or "db".
inline nlohmann::json to_json(const NetworkModel& net, const std::string& gain_unit = "linear")
{
    std::vector<std::vector<double>> gain(net.n_cells(), std::vector<double>(net.n_ues()));
    for (CellId i = 0; i < net.n_cells(); ++i)
        for (UeId j = 0; j < net.n_ues(); ++j)
            gain[i][j] = gain_unit == "db" ? linear_to_db(net.gain(i, j)) : net.gain(i, j);
    if (gain_unit != "db" && gain_unit != "linear")
        throw std::invalid_argument("gain_unit must be 'linear' or 'db'");
    return {
        {"n_cells", net.n_cells()},
        {"ue_home", std::vector<CellId>(net.ue_home().begin(), net.ue_home().end())},
        {"gain_unit", gain_unit},
        {"gain", gain},
        {"p_ru", std::vector<double>(net.p_ru_all().begin(), net.p_ru_all().end())},
        {"sigma2", net.sigma2()},
        {"demand", std::vector<double>(net.demands().begin(), net.demands().end())},
        {"load_limit", net.load_limit()},
    };
}

inline NetworkModel network_from_json(const nlohmann::json& j)
{
    const auto n_cells = j.at("n_cells").get<std::size_t>();
    auto ue_home = j.at("ue_home").get<std::vector<CellId>>();
    const std::string unit = j.value("gain_unit", std::string("linear"));
    if (unit != "db" && unit != "linear")
        throw std::invalid_argument("gain_unit must be 'linear' or 'db'");
    const auto rows = j.at("gain").get<std::vector<std::vector<double>>>();
    if (rows.size() != n_cells)
        throw std::invalid_argument("gain: expected one row per cell");
    std::vector<double> gain;
    gain.reserve(n_cells * ue_home.size());
    for (const auto& row : rows) {
        if (row.size() != ue_home.size())
            throw std::invalid_argument("gain: expected one column per UE");
        for (double g : row)
            gain.push_back(unit == "db" ? db_to_linear(g) : g);
    }
    std::vector<double> p_ru;
    if (j.at("p_ru").is_array())
        p_ru = j.at("p_ru").get<std::vector<double>>();
    else
        p_ru.assign(n_cells, j.at("p_ru").get<double>());
    return NetworkModel(n_cells, std::move(ue_home), std::move(gain), std::move(p_ru),
                        j.at("sigma2").get<double>(), j.at("demand").get<std::vector<double>>(),
                        j.value("load_limit", 1.0));
}

inline nlohmann::json to_json(const Group& g) { return g.members; }

inline nlohmann::json to_json(const CellSolution& s)
{
    nlohmann::json groups = nlohmann::json::array();
    for (std::size_t u = 0; u < s.groups.size(); ++u)
        groups.push_back({{"members", s.groups[u].members}, {"x", s.x[u]}, {"q", s.q[u]}});
    return {{"cell", s.cell}, {"load", s.load}, {"groups", groups}};
}

} // namespace noma

#endif // NOMA_MODEL_HPP
