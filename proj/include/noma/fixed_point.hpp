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
 * \file noma/fixed_point.hpp
 *
 * \brief Load-coupling fixed point rho = f(rho) over all cells, plus the
 *  diagnostics used to audit it (traces, decoding-order flips, SIF probe).
 */

#ifndef NOMA_FIXED_POINT_HPP
#define NOMA_FIXED_POINT_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include <noma/model.hpp>
#include <noma/single_cell.hpp>

namespace noma {

enum class Schedule { jacobi, gauss_seidel };

inline Schedule schedule_from_string(const std::string& s)
{
    if (s == "jacobi")
        return Schedule::jacobi;
    if (s == "gs" || s == "gauss_seidel" || s == "gauss-seidel")
        return Schedule::gauss_seidel;
    throw std::invalid_argument("unknown schedule: " + s);
}

struct SolveConfig
{
    Schedule schedule = Schedule::jacobi;
    double epsilon = 1e-4;        ///< stop once the sup-norm step is strictly below this
    std::size_t max_iters = 200;
    std::optional<LoadVector> initial; ///< all zeros when unset
    /// Stop early once any iterate exceeds this value. Only meaningful from
    /// the zero start, where iterates increase monotonically toward rho*.
    std::optional<double> stop_above;
    unsigned threads = 1;         ///< Jacobi sweeps only
    GroupLoadOptions group;

    void validate() const
    {
        if (!(epsilon > 0.0))
            throw std::invalid_argument("SolveConfig: epsilon must be > 0");
        if (max_iters < 1)
            throw std::invalid_argument("SolveConfig: max_iters must be >= 1");
    }
};

struct IterationTrace
{
    std::vector<LoadVector> loads;                  ///< loads[k] = rho^(k); loads[0] is the start
    std::vector<double> deltas;                     ///< deltas[k-1] = |rho^(k) - rho^(k-1)|_inf
    std::vector<std::vector<std::vector<Group>>> orders; ///< orders[k-1][cell] = groups of sweep k
    std::vector<std::vector<std::size_t>> flips;    ///< flips[k-1][cell]
    std::size_t iterations = 0;
    bool converged = false;

    std::size_t total_flips() const
    {
        std::size_t n = 0;
        for (const auto& row : flips)
            for (std::size_t f : row)
                n += f;
        return n;
    }
};

struct SolveResult
{
    LoadVector rho;
    std::vector<CellSolution> cells;
    IterationTrace trace;
    bool stopped_above = false; ///< set when SolveConfig::stop_above triggered
};

/// Thrown when the iteration does not settle within max_iters.
class ConvergenceError : public std::runtime_error
{
public:
    ConvergenceError(const std::string& what, IterationTrace trace)
        : std::runtime_error(what), trace_(std::move(trace))
    {
    }
    const IterationTrace& trace() const noexcept { return trace_; }

private:
    IterationTrace trace_;
};

namespace detail {

/// Groups of `now` whose member set also formed a group in `before` but in a
/// different decoding order.
inline std::size_t count_order_flips(const std::vector<Group>& before, const std::vector<Group>& now)
{
    std::size_t flips = 0;
    for (const auto& g : now) {
        if (g.size() < 2)
            continue;
        auto key = g.members;
        std::sort(key.begin(), key.end());
        for (const auto& h : before) {
            if (h.size() != g.size())
                continue;
            auto other = h.members;
            std::sort(other.begin(), other.end());
            if (other == key) {
                if (h.members != g.members)
                    ++flips;
                break;
            }
        }
    }
    return flips;
}

inline void jacobi_sweep(const NetworkModel& net, const GroupingPolicy& policy, const SolveConfig& cfg,
                         const LoadVector& rho, std::vector<CellSolution>& out)
{
    const std::size_t n = net.n_cells();
    out.assign(n, {});
    const unsigned threads = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(n)));
    if (threads == 1) {
        for (CellId i = 0; i < n; ++i)
            out[i] = solve_cell(net, i, rho, policy, cfg.group);
        return;
    }
    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back([&, t] {
                try {
                    for (CellId i = t; i < n; i += threads)
                        out[i] = solve_cell(net, i, rho, policy, cfg.group);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace detail

/**
 * Iterates rho^(k+1) = f(rho^(k)) until the sup-norm step drops below
 * epsilon. Jacobi evaluates every cell from rho^(k); Gauss-Seidel updates
 * cells in index order, each seeing its already-updated predecessors.
 *
 * Throws ConvergenceError (carrying the trace) after max_iters sweeps.
 */
inline SolveResult solve(const NetworkModel& net, const GroupingPolicy& policy, const SolveConfig& cfg = {})
{
    cfg.validate();
    policy.validate();
    const std::size_t n = net.n_cells();
    LoadVector rho = cfg.initial.value_or(LoadVector::zeros(n));
    if (rho.size() != n)
        throw std::invalid_argument("solve: initial load vector size mismatch");

    SolveResult res;
    auto& trace = res.trace;
    trace.loads.push_back(rho);
    std::vector<CellSolution> cells;

    for (std::size_t k = 1; k <= cfg.max_iters; ++k) {
        LoadVector next = rho;
        if (cfg.schedule == Schedule::jacobi) {
            detail::jacobi_sweep(net, policy, cfg, rho, cells);
            for (CellId i = 0; i < n; ++i)
                next.set(i, cells[i].load);
        } else {
            cells.assign(n, {});
            for (CellId i = 0; i < n; ++i) {
                cells[i] = solve_cell(net, i, next, policy, cfg.group);
                next.set(i, cells[i].load);
            }
        }

        const double delta = sup_distance(next, rho);
        std::vector<std::vector<Group>> orders(n);
        std::vector<std::size_t> flips(n, 0);
        for (CellId i = 0; i < n; ++i) {
            orders[i] = cells[i].groups;
            if (!trace.orders.empty())
                flips[i] = detail::count_order_flips(trace.orders.back()[i], orders[i]);
        }
        trace.loads.push_back(next);
        trace.deltas.push_back(delta);
        trace.orders.push_back(std::move(orders));
        trace.flips.push_back(std::move(flips));
        trace.iterations = k;
        rho = std::move(next);

        if (delta < cfg.epsilon) {
            trace.converged = true;
            res.rho = rho;
            res.cells = std::move(cells);
            return res;
        }
        if (cfg.stop_above) {
            const auto vals = rho.values();
            if (std::any_of(vals.begin(), vals.end(), [&](double r) { return r > *cfg.stop_above; })) {
                res.stopped_above = true;
                res.rho = rho;
                res.cells = std::move(cells);
                return res;
            }
        }
    }
    std::ostringstream msg;
    msg << "load coupling did not converge within " << cfg.max_iters << " iterations (last step "
        << trace.deltas.back() << ", epsilon " << cfg.epsilon << ")";
    throw ConvergenceError(msg.str(), std::move(trace));
}

// ---- post-processing ------------------------------------------------------------

struct Feasibility
{
    bool feasible = true;
    std::vector<CellId> violators;
};

/// Feasible iff every cell's load is within the limit (inclusive).
inline Feasibility check_feasibility(const LoadVector& rho, double limit)
{
    Feasibility f;
    for (CellId i = 0; i < rho.size(); ++i) {
        if (rho[i] > limit) {
            f.feasible = false;
            f.violators.push_back(i);
        }
    }
    return f;
}

struct Objective
{
    enum class Kind { sum, max, weighted };
    Kind kind = Kind::sum;
    std::vector<double> weights;

    static Objective sum() { return {Kind::sum, {}}; }
    static Objective max() { return {Kind::max, {}}; }
    static Objective weighted(std::vector<double> w) { return {Kind::weighted, std::move(w)}; }
};

/// Cost of a load vector; all variants are element-wise non-decreasing.
inline double objective(const LoadVector& rho, const Objective& obj = Objective::sum())
{
    double out = 0.0;
    switch (obj.kind) {
    case Objective::Kind::sum:
        for (double r : rho.values())
            out += r;
        return out;
    case Objective::Kind::max:
        for (double r : rho.values())
            out = std::max(out, r);
        return out;
    case Objective::Kind::weighted:
        if (obj.weights.size() != rho.size())
            throw std::invalid_argument("objective: one weight per cell required");
        for (std::size_t i = 0; i < rho.size(); ++i) {
            if (obj.weights[i] < 0.0)
                throw std::invalid_argument("objective: weights must be >= 0");
            out += obj.weights[i] * rho[i];
        }
        return out;
    }
    return out;
}

// ---- CSV ----------------------------------------------------------------------------

inline void write_trace_csv(std::ostream& os, const IterationTrace& trace)
{
    os << "iteration,cell,rho,delta_sup_norm,order_flips\n";
    os.precision(17);
    for (std::size_t k = 1; k < trace.loads.size(); ++k) {
        const auto& rho = trace.loads[k];
        for (CellId i = 0; i < rho.size(); ++i)
            os << k << ',' << i << ',' << rho[i] << ',' << trace.deltas[k - 1] << ','
               << trace.flips[k - 1][i] << '\n';
    }
}

// ---- SIF probe -------------------------------------------------------------------------

struct SifProbeOptions
{
    double max_load = 1.5;                ///< random loads drawn from [0, max_load]
    double alpha_max = 3.0;               ///< alpha drawn from (1, alpha_max]
    std::optional<double> fixed_alpha;    ///< use this alpha instead of drawing one
    double monotonicity_rel_tol = 1e-12;  ///< rounding slack of the bisection
    std::uint64_t seed = 1;
};

struct SifProbeReport
{
    std::size_t trials = 0;
    std::size_t checks = 0;                    ///< (trial, cell) evaluations
    std::size_t scalability_skipped = 0;       ///< cells with no demand: f == 0
    double worst_monotonicity_margin = std::numeric_limits<double>::infinity(); ///< min f(rho) - f(rho')
    double worst_scalability_margin = std::numeric_limits<double>::infinity();  ///< min alpha f(rho) - f(alpha rho)
    double worst_relative_scalability_margin = std::numeric_limits<double>::infinity();
    std::vector<std::string> violations;
    bool passed() const { return violations.empty(); }
};

/**
 * Randomized check of the two standard-interference-function properties of
 * every f_i: rho' <= rho implies f_i(rho') <= f_i(rho), and for alpha > 1,
 * alpha f_i(rho) > f_i(alpha rho).
 */
inline SifProbeReport sif_probe(const NetworkModel& net, const GroupingPolicy& policy, std::size_t trials,
                                const SifProbeOptions& opt = {})
{
    if (trials < 1)
        throw std::invalid_argument("sif_probe: trials must be >= 1");
    boost::random::mt19937_64 rng(opt.seed);
    boost::random::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t n = net.n_cells();

    SifProbeReport rep;
    for (std::size_t t = 0; t < trials; ++t) {
        std::vector<double> hi(n), lo(n);
        for (std::size_t i = 0; i < n; ++i) {
            hi[i] = opt.max_load * unit(rng);
            lo[i] = hi[i] * unit(rng);
        }
        double alpha = opt.fixed_alpha.value_or(0.0);
        if (!opt.fixed_alpha) {
            do
                alpha = 1.0 + (opt.alpha_max - 1.0) * unit(rng);
            while (alpha <= 1.0);
        }
        const LoadVector rho(hi), rho_lo(lo);
        const LoadVector rho_scaled = rho.scaled(alpha);
        ++rep.trials;

        for (CellId i = 0; i < n; ++i) {
            const double f_hi = solve_cell(net, i, rho, policy).load;
            const double f_lo = solve_cell(net, i, rho_lo, policy).load;
            const double f_sc = solve_cell(net, i, rho_scaled, policy).load;
            ++rep.checks;

            const double mono = f_hi - f_lo;
            rep.worst_monotonicity_margin = std::min(rep.worst_monotonicity_margin, mono);
            if (mono < -opt.monotonicity_rel_tol * std::max(f_hi, f_lo)) {
                std::ostringstream s;
                s << "monotonicity violated: trial " << t << " cell " << i << " f(rho)=" << f_hi
                  << " f(rho')=" << f_lo;
                rep.violations.push_back(s.str());
            }

            if (f_hi == 0.0) {
                ++rep.scalability_skipped;
                continue;
            }
            const double scal = alpha * f_hi - f_sc;
            rep.worst_scalability_margin = std::min(rep.worst_scalability_margin, scal);
            rep.worst_relative_scalability_margin =
                std::min(rep.worst_relative_scalability_margin, scal / (alpha * f_hi));
            if (!(scal > 0.0)) {
                std::ostringstream s;
                s << "scalability violated: trial " << t << " cell " << i << " alpha=" << alpha
                  << " alpha*f(rho)=" << alpha * f_hi << " f(alpha*rho)=" << f_sc;
                rep.violations.push_back(s.str());
            }
        }
    }
    return rep;
}

} // namespace noma

#endif // NOMA_FIXED_POINT_HPP
