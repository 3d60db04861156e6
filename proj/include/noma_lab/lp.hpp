// SPDX-License-Identifier: Apache-2.0
//
// noma-lab: secure massive NOMA downlink simulator and power optimizer
// ------------------------------------------------------------------------

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace noma {

/// minimize objective . x  subject to  rows[i] . x <= bounds[i],
///                                     0 <= x_j <= upper[j] (when set).
struct LpProblem {
    std::vector<double> objective;
    std::vector<std::vector<double>> rows;
    std::vector<double> bounds;
    std::vector<std::optional<double>> upper;

    std::size_t variable_count() const { return objective.size(); }

    void add_row(std::vector<double> row, double bound) {
        rows.push_back(std::move(row));
        bounds.push_back(bound);
    }

    bool well_formed() const {
        const std::size_t n = objective.size();
        if (rows.size() != bounds.size()) return false;
        if (!upper.empty() && upper.size() != n) return false;
        for (double c : objective)
            if (!std::isfinite(c)) return false;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != n || !std::isfinite(bounds[i])) return false;
            for (double a : rows[i])
                if (!std::isfinite(a)) return false;
        }
        for (const auto& u : upper)
            if (u && !(std::isfinite(*u) && *u >= 0.0)) return false;
        return true;
    }
};

enum class LpStatus { optimal, infeasible, unbounded };

inline std::string_view to_string(LpStatus s) {
    switch (s) {
        case LpStatus::optimal: return "optimal";
        case LpStatus::infeasible: return "infeasible";
        case LpStatus::unbounded: return "unbounded";
    }
    return "unknown";
}

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    std::vector<double> x;
    double objective = 0.0;
    std::size_t pivots = 0;

    bool optimal() const { return status == LpStatus::optimal; }
};

namespace detail {

/// Dense two-phase tableau simplex with Bland's least-index rule.
///
/// Columns: structural variables, one slack per row, then one artificial per
/// row whose right-hand side was negative. Row i of `tab_` is
/// [coefficients | rhs]; the last row holds reduced costs and -objective.
class SimplexTableau {
  public:
    static constexpr double kPivotTol = 1e-11;
    static constexpr double kCostTol = 1e-10;

    SimplexTableau(const std::vector<std::vector<double>>& a, const std::vector<double>& b, std::size_t n)
        : rows_(a.size()), structural_(n) {
        std::vector<bool> flipped(rows_);
        std::size_t artificial = 0;
        for (std::size_t i = 0; i < rows_; ++i) {
            flipped[i] = b[i] < 0.0;
            if (flipped[i]) ++artificial;
        }
        slack_begin_ = n;
        art_begin_ = n + rows_;
        cols_ = art_begin_ + artificial;
        tab_.assign(rows_ + 1, std::vector<double>(cols_ + 1, 0.0));
        basis_.resize(rows_);

        std::size_t next_art = art_begin_;
        for (std::size_t i = 0; i < rows_; ++i) {
            const double sign = flipped[i] ? -1.0 : 1.0;
            for (std::size_t j = 0; j < n; ++j) tab_[i][j] = sign * a[i][j];
            tab_[i][slack_begin_ + i] = sign;
            tab_[i][cols_] = sign * b[i];
            if (flipped[i]) {
                tab_[i][next_art] = 1.0;
                basis_[i] = next_art++;
            } else {
                basis_[i] = slack_begin_ + i;
            }
        }
    }

    /// Returns false when the constraints admit no point.
    bool phase_one(double feas_tol) {
        if (art_begin_ == cols_) return true;
        auto& cost = tab_[rows_];
        std::fill(cost.begin(), cost.end(), 0.0);
        for (std::size_t j = art_begin_; j < cols_; ++j) cost[j] = 1.0;
        price_out();
        run(cols_);
        if (-tab_[rows_][cols_] > feas_tol) return false;

        // Drive zero-level artificials out of the basis where possible.
        for (std::size_t i = 0; i < rows_; ++i) {
            if (basis_[i] < art_begin_) continue;
            for (std::size_t j = 0; j < art_begin_; ++j) {
                if (std::abs(tab_[i][j]) > kPivotTol) {
                    pivot(i, j);
                    break;
                }
            }
        }
        return true;
    }

    /// Returns false when the objective is unbounded below.
    bool phase_two(const std::vector<double>& c) {
        auto& cost = tab_[rows_];
        std::fill(cost.begin(), cost.end(), 0.0);
        for (std::size_t j = 0; j < structural_; ++j) cost[j] = c[j];
        price_out();
        return run(art_begin_);
    }

    std::vector<double> solution() const {
        std::vector<double> x(structural_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i)
            if (basis_[i] < structural_) x[basis_[i]] = std::max(0.0, tab_[i][cols_]);
        return x;
    }

    std::size_t pivots() const { return pivots_; }

  private:
    void price_out() {
        auto& cost = tab_[rows_];
        for (std::size_t i = 0; i < rows_; ++i) {
            const double cb = cost[basis_[i]];
            if (cb == 0.0) continue;
            for (std::size_t j = 0; j <= cols_; ++j) cost[j] -= cb * tab_[i][j];
        }
    }

    /// Iterates until optimal (true) or unbounded (false). Only columns
    /// below `limit` may enter the basis.
    bool run(std::size_t limit) {
        for (;;) {
            std::size_t enter = limit;
            for (std::size_t j = 0; j < limit; ++j)
                if (tab_[rows_][j] < -kCostTol) {
                    enter = j;
                    break;
                }
            if (enter == limit) return true;

            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < rows_; ++i)
                if (tab_[i][enter] > kPivotTol) best = std::min(best, tab_[i][cols_] / tab_[i][enter]);
            if (best == std::numeric_limits<double>::infinity()) return false;

            // Ties go to the basic variable with the lowest index.
            const double tie = best + 1e-12 * std::max(1.0, std::abs(best));
            std::size_t leave = rows_;
            for (std::size_t i = 0; i < rows_; ++i) {
                if (tab_[i][enter] <= kPivotTol) continue;
                if (tab_[i][cols_] / tab_[i][enter] <= tie && (leave == rows_ || basis_[i] < basis_[leave]))
                    leave = i;
            }
            pivot(leave, enter);
        }
    }

    void pivot(std::size_t r, std::size_t s) {
        ++pivots_;
        auto& prow = tab_[r];
        const double inv = 1.0 / prow[s];
        for (auto& v : prow) v *= inv;
        prow[s] = 1.0;
        for (std::size_t i = 0; i <= rows_; ++i) {
            if (i == r) continue;
            auto& row = tab_[i];
            const double f = row[s];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= cols_; ++j) row[j] -= f * prow[j];
            row[s] = 0.0;
        }
        basis_[r] = s;
    }

    std::size_t rows_, structural_;
    std::size_t slack_begin_ = 0, art_begin_ = 0, cols_ = 0;
    std::vector<std::vector<double>> tab_;
    std::vector<std::size_t> basis_;
    std::size_t pivots_ = 0;
};

}  // namespace detail

/// Solves a small dense LP exactly up to pivot arithmetic.
///
/// Rows are rescaled to unit max-norm first; upper bounds become extra rows.
/// Throws std::invalid_argument for a malformed problem.
inline LpResult solve_lp(const LpProblem& problem) {
    if (!problem.well_formed()) throw std::invalid_argument("solve_lp: malformed problem");
    const std::size_t n = problem.variable_count();

    std::vector<std::vector<double>> a;
    std::vector<double> b;
    a.reserve(problem.rows.size() + n);
    b.reserve(problem.rows.size() + n);
    LpResult result;
    for (std::size_t i = 0; i < problem.rows.size(); ++i) {
        double scale = 0.0;
        for (double v : problem.rows[i]) scale = std::max(scale, std::abs(v));
        if (scale == 0.0) {
            if (problem.bounds[i] < 0.0) return result;  // 0 <= negative
            continue;
        }
        std::vector<double> row(problem.rows[i]);
        for (auto& v : row) v /= scale;
        a.push_back(std::move(row));
        b.push_back(problem.bounds[i] / scale);
    }
    for (std::size_t j = 0; j < problem.upper.size(); ++j) {
        if (!problem.upper[j]) continue;
        std::vector<double> row(n, 0.0);
        row[j] = 1.0;
        a.push_back(std::move(row));
        b.push_back(*problem.upper[j]);
    }

    double rhs_scale = 1.0;
    for (double v : b) rhs_scale = std::max(rhs_scale, std::abs(v));

    detail::SimplexTableau tableau(a, b, n);
    if (!tableau.phase_one(1e-9 * rhs_scale)) {
        result.pivots = tableau.pivots();
        return result;
    }
    if (!tableau.phase_two(problem.objective)) {
        result.status = LpStatus::unbounded;
        result.pivots = tableau.pivots();
        return result;
    }
    result.status = LpStatus::optimal;
    result.x = tableau.solution();
    result.objective = 0.0;
    for (std::size_t j = 0; j < n; ++j) result.objective += problem.objective[j] * result.x[j];
    result.pivots = tableau.pivots();
    return result;
}

}  // namespace noma
