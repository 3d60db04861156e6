// SPDX-License-Identifier: Apache-2.0
//
// noma-lab: secure massive NOMA downlink simulator and power optimizer
// ------------------------------------------------------------------------

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "noma_lab/channel_estimation.hpp"
#include "noma_lab/lp.hpp"
#include "noma_lab/rate_analysis.hpp"
#include "noma_lab/system_model.hpp"

namespace noma {

// ---------------------------------------------------------------------------
// Variable layout and linear rows

/// Flat index of user (m, n), n >= 1, in a per-user decision vector.
/// Eavesdroppers never get a slot.
class UserLayout {
  public:
    explicit UserLayout(const SystemConfig& c) : offsets_(c.n_clusters + 1, 0) {
        for (std::size_t m = 0; m < c.n_clusters; ++m) offsets_[m + 1] = offsets_[m] + c.cluster_size(m);
    }

    std::size_t size() const { return offsets_.back(); }
    std::size_t index(std::size_t m, std::size_t n) const { return offsets_[m] + n - 1; }
    std::size_t cluster_begin(std::size_t m) const { return offsets_[m]; }
    std::size_t cluster_end(std::size_t m) const { return offsets_[m + 1]; }

    Table unflatten(const std::vector<double>& x) const {
        Table t(offsets_.size() - 1);
        for (std::size_t m = 0; m + 1 < offsets_.size(); ++m)
            t[m].assign(x.begin() + offsets_[m], x.begin() + offsets_[m + 1]);
        return t;
    }

    std::vector<double> flatten(const Table& t) const {
        std::vector<double> x;
        x.reserve(size());
        for (const auto& row : t) x.insert(x.end(), row.begin(), row.end());
        return x;
    }

  private:
    std::vector<std::size_t> offsets_;
};

/// coeffs . x <= bound.
struct LinearRow {
    std::vector<double> coeffs;
    double bound = 0.0;

    double lhs(const std::vector<double>& x) const {
        double s = 0.0;
        for (std::size_t j = 0; j < coeffs.size(); ++j) s += coeffs[j] * x[j];
        return s;
    }

    bool satisfied_by(const std::vector<double>& x, double slack = 0.0) const {
        return lhs(x) <= bound + slack;
    }
};

inline double rate_threshold(double rate) { return std::exp2(rate) - 1.0; }

/// Copy of `c` with user pilot powers taken from a flat vector.
inline SystemConfig with_pilot_powers(SystemConfig c, const std::vector<double>& q) {
    const UserLayout layout(c);
    for (std::size_t m = 0; m < c.n_clusters; ++m)
        for (std::size_t n = 1; n <= c.cluster_size(m); ++n) c.pilot_power[m][n] = q[layout.index(m, n)];
    return c;
}

/// Copy of `c` with user transmit powers taken from a flat vector.
inline SystemConfig with_tx_powers(SystemConfig c, const std::vector<double>& p) {
    c.tx_power = UserLayout(c).unflatten(p);
    return c;
}

// ---------------------------------------------------------------------------
// Pilot-power (Q) space rows, transmit powers held fixed

/// Eve's rate against (m, n) at most r_e, cross-multiplied by the pilot
/// energy denominator. The attack power U_m enters only the bound.
inline LinearRow build_c1_in_q(const SystemConfig& c, std::size_t m, std::size_t n, double r_e) {
    detail::check_user(c, m, n);
    const UserLayout layout(c);
    const double t = rate_threshold(r_e);
    const double b = c.beta(m);
    const double u = c.attack_power(m);
    const double tau = static_cast<double>(c.pilot_length);
    const double nt = static_cast<double>(c.n_antennas);
    const double noise_inter = b * c.other_cluster_power(m) + kNoisePower;
    const double leak = b * b * nt * tau * u;

    LinearRow row;
    row.coeffs.assign(layout.size(), 0.0);
    for (std::size_t k = 1; k <= c.cluster_size(m); ++k)
        row.coeffs[layout.index(m, k)] = -t * noise_inter * c.alpha(m, k) * tau;
    row.bound = t * leak * detail::others_in_cluster(c, m, n) + t * noise_inter * (1.0 + b * u * tau) -
                leak * c.tx(m, n);
    return row;
}

/// User (m, n)'s closed-form rate at least r_o, cross-multiplied by the
/// pilot energy denominator.
inline LinearRow build_c3_in_q(const SystemConfig& c, std::size_t m, std::size_t n, double r_o) {
    detail::check_user(c, m, n);
    const UserLayout layout(c);
    const double t = rate_threshold(r_o);
    const double a = c.alpha(m, n);
    const double tau = static_cast<double>(c.pilot_length);
    const double nt = static_cast<double>(c.n_antennas);
    const double noise_inter = a * c.other_cluster_power(m) + kNoisePower;
    const double intra =
        detail::stronger_power(c, m, n) + c.sic_residual_coeff * detail::weaker_power(c, m, n);

    LinearRow row;
    row.coeffs.assign(layout.size(), 0.0);
    for (std::size_t k = 1; k <= c.cluster_size(m); ++k)
        row.coeffs[layout.index(m, k)] = t * noise_inter * c.alpha(m, k) * tau;
    row.coeffs[layout.index(m, n)] -= a * a * tau * nt * (c.tx(m, n) - t * intra);
    row.bound = -t * noise_inter * (1.0 + c.beta(m) * c.attack_power(m) * tau);
    return row;
}

// ---------------------------------------------------------------------------
// Transmit-power (P) space rows, correlation coefficients held fixed

struct PowerRows {
    std::vector<LinearRow> c1;  ///< eavesdropping caps, one per user
    std::vector<LinearRow> c3;  ///< legitimate targets, one per user
    std::vector<LinearRow> c4;  ///< total power budget
    std::vector<LinearRow> c5;  ///< P_{m,n} <= P_{m,n+1}

    std::vector<const LinearRow*> all() const {
        std::vector<const LinearRow*> out;
        for (const auto* group : {&c1, &c3, &c4, &c5})
            for (const auto& r : *group) out.push_back(&r);
        return out;
    }
};

inline LinearRow build_c1_in_p(const SystemConfig& c, const EstimationModel& model, std::size_t m,
                               std::size_t n, double r_e) {
    detail::check_user(c, m, n);
    const UserLayout layout(c);
    const double t = rate_threshold(r_e);
    const double b = c.beta(m);
    const double gain = b * model.eve_rho(m) * static_cast<double>(c.n_antennas);

    LinearRow row;
    row.coeffs.assign(layout.size(), 0.0);
    for (std::size_t j = 0; j < c.n_clusters; ++j)
        for (std::size_t i = 1; i <= c.cluster_size(j); ++i) {
            double& v = row.coeffs[layout.index(j, i)];
            if (j != m)
                v = -t * b;
            else
                v = (i == n) ? gain : -t * gain;
        }
    row.bound = t * kNoisePower;
    return row;
}

inline LinearRow build_c3_in_p(const SystemConfig& c, const EstimationModel& model, std::size_t m,
                               std::size_t n, double r_o) {
    detail::check_user(c, m, n);
    const UserLayout layout(c);
    const double t = rate_threshold(r_o);
    const double a = c.alpha(m, n);
    const double gain = a * model.rho[m][n] * static_cast<double>(c.n_antennas);

    LinearRow row;
    row.coeffs.assign(layout.size(), 0.0);
    for (std::size_t j = 0; j < c.n_clusters; ++j)
        for (std::size_t i = 1; i <= c.cluster_size(j); ++i) {
            double& v = row.coeffs[layout.index(j, i)];
            if (j != m)
                v = t * a;
            else if (i < n)
                v = t * gain;
            else if (i > n)
                v = t * c.sic_residual_coeff * gain;
            else
                v = -gain;
        }
    row.bound = -t * kNoisePower;
    return row;
}

inline PowerRows build_constraints_in_p(const SystemConfig& c, const EstimationModel& model, double r_o,
                                        double r_e, double p_tot) {
    const UserLayout layout(c);
    PowerRows rows;
    for (std::size_t m = 0; m < c.n_clusters; ++m)
        for (std::size_t n = 1; n <= c.cluster_size(m); ++n) {
            rows.c1.push_back(build_c1_in_p(c, model, m, n, r_e));
            rows.c3.push_back(build_c3_in_p(c, model, m, n, r_o));
        }
    rows.c4.push_back(LinearRow{std::vector<double>(layout.size(), 1.0), p_tot});
    for (std::size_t m = 0; m < c.n_clusters; ++m)
        for (std::size_t n = 1; n < c.cluster_size(m); ++n) {
            LinearRow r{std::vector<double>(layout.size(), 0.0), 0.0};
            r.coeffs[layout.index(m, n)] = 1.0;
            r.coeffs[layout.index(m, n + 1)] = -1.0;
            rows.c5.push_back(std::move(r));
        }
    return rows;
}

// ---------------------------------------------------------------------------
// Optimization problems

enum class SolveStatus { optimal, infeasible, infeasible_at_start };

inline std::string_view to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::infeasible_at_start: return "infeasible_at_start";
    }
    return "unknown";
}

/// Outer search over the minimum-rate target r^o.
enum class SearchMode {
    bisection,  ///< default; brackets then halves down to delta_o / 16
    stepped,    ///< r^o = r^e, r^e + delta_o, ... until the LP fails
};

struct PowerSolution {
    SolveStatus status = SolveStatus::infeasible;
    /// powers[m][n - 1]: Q for pilot problems, P for transmit problems.
    Table powers;
    /// r^o: target proven feasible (max-min) or the given target (min-power).
    double min_legit_rate = 0.0;
    /// r^e.
    double eve_cap = 0.0;
    double objective = 0.0;
    std::size_t lp_solves = 0;

    bool ok() const { return status == SolveStatus::optimal; }
};

inline LpProblem pilot_power_lp(const SystemConfig& c, double r_e, double r_o, double q_max) {
    const UserLayout layout(c);
    LpProblem lp;
    lp.objective.assign(layout.size(), 1.0);
    lp.upper.assign(layout.size(), q_max);
    for (std::size_t m = 0; m < c.n_clusters; ++m)
        for (std::size_t n = 1; n <= c.cluster_size(m); ++n) {
            auto c1 = build_c1_in_q(c, m, n, r_e);
            lp.add_row(std::move(c1.coeffs), c1.bound);
            auto c3 = build_c3_in_q(c, m, n, r_o);
            lp.add_row(std::move(c3.coeffs), c3.bound);
        }
    return lp;
}

inline LpProblem transmit_power_lp(const SystemConfig& c, const EstimationModel& model, double r_e,
                                   double r_o, double p_tot) {
    const UserLayout layout(c);
    LpProblem lp;
    lp.objective.assign(layout.size(), 1.0);
    const auto rows = build_constraints_in_p(c, model, r_o, r_e, p_tot);
    for (const auto* r : rows.all()) lp.add_row(r->coeffs, r->bound);
    return lp;
}

namespace detail {

using FeasibilityProbe = std::function<LpResult(double r_o)>;

inline PowerSolution finish(const UserLayout& layout, const LpResult& lp, double r_o, double r_e,
                            std::size_t solves) {
    PowerSolution s;
    s.status = SolveStatus::optimal;
    s.powers = layout.unflatten(lp.x);
    s.min_legit_rate = r_o;
    s.eve_cap = r_e;
    s.objective = lp.objective;
    s.lp_solves = solves;
    return s;
}

/// Largest r^o >= r^e the probe accepts, per the chosen outer search.
inline PowerSolution maxmin_search(const UserLayout& layout, const FeasibilityProbe& probe, double r_e,
                                   double delta_o, SearchMode mode) {
    if (!(delta_o > 0.0)) throw std::invalid_argument("delta_o must be positive");
    std::size_t solves = 1;
    LpResult best = probe(r_e);
    if (!best.optimal()) {
        PowerSolution s;
        s.status = SolveStatus::infeasible_at_start;
        s.eve_cap = r_e;
        s.lp_solves = solves;
        return s;
    }
    double lo = r_e;
    constexpr std::size_t kMaxSteps = 200000;

    if (mode == SearchMode::stepped) {
        for (std::size_t k = 1; k <= kMaxSteps; ++k) {
            const double next = r_e + static_cast<double>(k) * delta_o;
            LpResult trial = probe(next);
            ++solves;
            if (!trial.optimal()) break;
            lo = next;
            best = std::move(trial);
        }
        return finish(layout, best, lo, r_e, solves);
    }

    double step = delta_o;
    double hi = lo + step;
    for (int k = 0; k < 64; ++k) {
        LpResult trial = probe(hi);
        ++solves;
        if (!trial.optimal()) break;
        lo = hi;
        best = std::move(trial);
        step *= 2.0;
        hi = lo + step;
    }
    const double tol = delta_o / 16.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        LpResult trial = probe(mid);
        ++solves;
        if (trial.optimal()) {
            lo = mid;
            best = std::move(trial);
        } else {
            hi = mid;
        }
    }
    return finish(layout, best, lo, r_e, solves);
}

}  // namespace detail

/// Max-min pilot power control: the largest common legitimate rate with
/// every eavesdropping rate capped at r_e and Q_{m,n} <= q_max.
inline PowerSolution op2_maxmin_q(const SystemConfig& c, double r_e, double q_max, double delta_o,
                                  SearchMode mode = SearchMode::bisection) {
    const UserLayout layout(c);
    auto probe = [&](double r_o) { return solve_lp(pilot_power_lp(c, r_e, r_o, q_max)); };
    return detail::maxmin_search(layout, probe, r_e, delta_o, mode);
}

/// Minimum total pilot power meeting both rate targets.
inline PowerSolution op3_minpower_q(const SystemConfig& c, double r_e, double r_o, double q_max) {
    const UserLayout layout(c);
    const LpResult lp = solve_lp(pilot_power_lp(c, r_e, r_o, q_max));
    if (!lp.optimal()) {
        PowerSolution s;
        s.eve_cap = r_e;
        s.min_legit_rate = r_o;
        s.lp_solves = 1;
        return s;
    }
    return detail::finish(layout, lp, r_o, r_e, 1);
}

/// Max-min BS power allocation under the eavesdropping cap, the power
/// budget and the SIC power ordering.
inline PowerSolution op4_maxmin_p(const SystemConfig& c, const EstimationModel& model, double r_e,
                                  double p_tot, double delta_o, SearchMode mode = SearchMode::bisection) {
    const UserLayout layout(c);
    auto probe = [&](double r_o) { return solve_lp(transmit_power_lp(c, model, r_e, r_o, p_tot)); };
    return detail::maxmin_search(layout, probe, r_e, delta_o, mode);
}

/// Minimum total BS power meeting both rate targets within the budget.
inline PowerSolution op5_minpower_p(const SystemConfig& c, const EstimationModel& model, double r_e,
                                    double r_o, double p_tot) {
    const UserLayout layout(c);
    const LpResult lp = solve_lp(transmit_power_lp(c, model, r_e, r_o, p_tot));
    if (!lp.optimal()) {
        PowerSolution s;
        s.eve_cap = r_e;
        s.min_legit_rate = r_o;
        s.lp_solves = 1;
        return s;
    }
    return detail::finish(layout, lp, r_o, r_e, 1);
}

/// Upper bound on any feasible common rate: user (m, n) holding the whole
/// budget alone, minimized over users.
inline double common_rate_cap(const SystemConfig& c, const EstimationModel& model, double p_tot) {
    double cap = std::numeric_limits<double>::infinity();
    SystemConfig solo = c;
    for (auto& row : solo.tx_power) std::fill(row.begin(), row.end(), 0.0);
    for (std::size_t m = 0; m < c.n_clusters; ++m)
        for (std::size_t n = 1; n <= c.cluster_size(m); ++n) {
            solo.tx_power[m][n - 1] = p_tot;
            cap = std::min(cap, legit_rate_closed_form(solo, model, m, n));
            solo.tx_power[m][n - 1] = 0.0;
        }
    return cap;
}

/// OP4 over a grid of caps r_e = 0, step, 2 step, ... up to the common-rate
/// cap, keeping the largest guaranteed secrecy margin r^o - r^e.
struct SecrecyScan {
    PowerSolution best;
    double margin = 0.0;
    std::size_t caps_tried = 0;
};

inline SecrecyScan op4_secrecy_scan(const SystemConfig& c, const EstimationModel& model, double p_tot,
                                    double delta_o, double step, SearchMode mode = SearchMode::bisection) {
    if (!(step > 0.0)) throw std::invalid_argument("op4_secrecy_scan: step must be positive");
    const double cap = common_rate_cap(c, model, p_tot);
    SecrecyScan scan;
    scan.best.status = SolveStatus::infeasible_at_start;
    scan.margin = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0;; ++k) {
        const double r_e = static_cast<double>(k) * step;
        if (r_e > cap) break;
        ++scan.caps_tried;
        PowerSolution s = op4_maxmin_p(c, model, r_e, p_tot, delta_o, mode);
        if (!s.ok()) continue;
        const double margin = s.min_legit_rate - r_e;
        if (margin > scan.margin) {
            scan.margin = margin;
            scan.best = std::move(s);
        }
    }
    return scan;
}

inline bool pilot_targets_feasible(const SystemConfig& c, double r_e, double r_o, double q_max) {
    return solve_lp(pilot_power_lp(c, r_e, r_o, q_max)).optimal();
}

inline bool transmit_targets_feasible(const SystemConfig& c, const EstimationModel& model, double r_e,
                                      double r_o, double p_tot) {
    return solve_lp(transmit_power_lp(c, model, r_e, r_o, p_tot)).optimal();
}

// ---------------------------------------------------------------------------
// Re-verification through the closed-form rates

struct RateCheck {
    double min_legit = 0.0;
    double max_eve = 0.0;

    bool meets(double r_o, double r_e, double tol) const {
        return min_legit >= r_o - tol && max_eve <= r_e + tol;
    }
};

inline RateCheck closed_form_extremes(const SystemConfig& c, const EstimationModel& model) {
    RateCheck rc{std::numeric_limits<double>::infinity(), 0.0};
    for (std::size_t m = 0; m < c.n_clusters; ++m)
        for (std::size_t n = 1; n <= c.cluster_size(m); ++n) {
            rc.min_legit = std::min(rc.min_legit, legit_rate_closed_form(c, model, m, n));
            rc.max_eve = std::max(rc.max_eve, eve_rate_closed_form(c, model, m, n));
        }
    return rc;
}

/// Closed-form rate extremes once pilot powers `q` replace the configured ones.
inline RateCheck check_pilot_solution(const SystemConfig& c, const Table& q) {
    const auto applied = with_pilot_powers(c, UserLayout(c).flatten(q));
    return closed_form_extremes(applied, compute_rho(applied));
}

/// Closed-form rate extremes once transmit powers `p` replace the configured ones.
inline RateCheck check_transmit_solution(const SystemConfig& c, const EstimationModel& model, const Table& p) {
    SystemConfig applied = c;
    applied.tx_power = p;
    return closed_form_extremes(applied, model);
}

// ---------------------------------------------------------------------------
// Baselines

/// Every user gets p_tot / K.
inline SystemConfig equal_allocation(SystemConfig c, double p_tot) {
    const double each = p_tot / static_cast<double>(c.total_users());
    for (auto& row : c.tx_power) std::fill(row.begin(), row.end(), each);
    return c;
}

/// User (m, n) gets n / (1 + ... + N_m) of the per-cluster share p_tot / M.
inline SystemConfig fixed_proportion_allocation(SystemConfig c, double p_tot) {
    const double share = p_tot / static_cast<double>(c.n_clusters);
    for (std::size_t m = 0; m < c.n_clusters; ++m) {
        const double nm = static_cast<double>(c.cluster_size(m));
        const double denom = nm * (nm + 1.0) / 2.0;
        for (std::size_t n = 1; n <= c.cluster_size(m); ++n)
            c.tx_power[m][n - 1] = static_cast<double>(n) / denom * share;
    }
    return c;
}

/// Every user pilots with the same power q.
inline SystemConfig equal_pilot_powers(SystemConfig c, double q) {
    for (auto& row : c.pilot_power) std::fill(row.begin() + 1, row.end(), q);
    return c;
}

/// Smallest common pilot power meeting both targets, found by bisection on
/// the closed-form rates; empty when even q_max fails. Feasibility is
/// monotone in q because every rho_{m,n} grows and rho_{m,0} shrinks with it.
inline std::optional<double> min_equal_pilot_power(const SystemConfig& c, double r_e, double r_o,
                                                   double q_max) {
    auto ok = [&](double q) {
        const auto applied = equal_pilot_powers(c, q);
        return closed_form_extremes(applied, compute_rho(applied)).meets(r_o, r_e, 0.0);
    };
    if (!ok(q_max)) return std::nullopt;
    if (ok(0.0)) return 0.0;
    double lo = 0.0, hi = q_max;
    for (int k = 0; k < 200 && hi - lo > 1e-13 * q_max; ++k) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? hi : lo) = mid;
    }
    return hi;
}

}  // namespace noma
