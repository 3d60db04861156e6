// SPDX-License-Identifier: Apache-2.0
//
// noma-lab: secure massive NOMA downlink simulator and power optimizer
// ------------------------------------------------------------------------

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "noma_lab/channel_estimation.hpp"
#include "noma_lab/system_model.hpp"

namespace noma {

/// Gamma^2(N + 1/2) / Gamma^2(N), the squared mean norm of a CN(0, I_N) vector.
inline double gamma_ratio_sq(std::size_t n_antennas) {
    if (n_antennas == 0) throw std::invalid_argument("gamma_ratio_sq: n_antennas must be >= 1");
    const double n = static_cast<double>(n_antennas);
    return std::exp(2.0 * (std::lgamma(n + 0.5) - std::lgamma(n)));
}

// ---------------------------------------------------------------------------
// Term powers of the use-and-forget decomposition

struct TermPowerSet {
    double desired = 0.0;
    double leakage = 0.0;
    double intra = 0.0;
    double inter = 0.0;
};

/// Desired, leakage, residual intra-cluster and inter-cluster powers seen by
/// user (m, n). `exact` keeps the finite-N_t Gamma ratio and the (1 - rho)
/// terms; `large_nt` drops them.
struct TermPowers {
    TermPowerSet exact;
    TermPowerSet large_nt;
};

namespace detail {

inline void check_user(const SystemConfig& c, std::size_t m, std::size_t n) {
    if (m >= c.n_clusters || n == 0 || n > c.cluster_size(m))
        throw std::out_of_range("user index outside 1..N_m");
}

inline double stronger_power(const SystemConfig& c, std::size_t m, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 1; i < n; ++i) s += c.tx(m, i);
    return s;
}

inline double weaker_power(const SystemConfig& c, std::size_t m, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = n + 1; i <= c.cluster_size(m); ++i) s += c.tx(m, i);
    return s;
}

inline double others_in_cluster(const SystemConfig& c, std::size_t m, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 1; i <= c.cluster_size(m); ++i)
        if (i != n) s += c.tx(m, i);
    return s;
}

}  // namespace detail

inline TermPowers term_powers(const SystemConfig& c, const EstimationModel& model, std::size_t m,
                              std::size_t n) {
    detail::check_user(c, m, n);
    const double a = c.alpha(m, n);
    const double p = c.tx(m, n);
    const double rho = model.rho[m][n];
    const double nt = static_cast<double>(c.n_antennas);
    const double g2 = gamma_ratio_sq(c.n_antennas);
    const double stronger = detail::stronger_power(c, m, n);
    const double inter = a * c.other_cluster_power(m);

    TermPowers t;
    t.exact.desired = a * p * rho * g2;
    t.exact.leakage = std::max(0.0, a * p * (rho * nt + 1.0 - rho - rho * g2));
    t.exact.intra = a * (rho * nt + 1.0 - rho) * stronger;
    t.exact.inter = inter;

    t.large_nt.desired = a * p * rho * nt;
    t.large_nt.leakage = 0.0;
    t.large_nt.intra = a * rho * nt * stronger;
    t.large_nt.inter = inter;
    return t;
}

// ---------------------------------------------------------------------------
// Closed-form ergodic rates (bits per channel use)

/// Legitimate ergodic rate of user (m, n) under the hardened-channel
/// approximation, with imperfect-SIC residual from weaker users.
inline double legit_rate_closed_form(const SystemConfig& c, const EstimationModel& model, std::size_t m,
                                     std::size_t n) {
    detail::check_user(c, m, n);
    const double a = c.alpha(m, n);
    const double gain = a * model.rho[m][n] * static_cast<double>(c.n_antennas);
    const double intra = detail::stronger_power(c, m, n) +
                         c.sic_residual_coeff * detail::weaker_power(c, m, n);
    const double sinr =
        gain * c.tx(m, n) / (gain * intra + a * c.other_cluster_power(m) + kNoisePower);
    return std::log2(1.0 + sinr);
}

/// Eavesdropping ergodic rate against user (m, n); Eve never cancels.
inline double eve_rate_closed_form(const SystemConfig& c, const EstimationModel& model, std::size_t m,
                                   std::size_t n) {
    detail::check_user(c, m, n);
    const double b = c.beta(m);
    const double gain = b * model.eve_rho(m) * static_cast<double>(c.n_antennas);
    const double sinr = gain * c.tx(m, n) /
                        (gain * detail::others_in_cluster(c, m, n) + b * c.other_cluster_power(m) +
                         kNoisePower);
    return std::log2(1.0 + sinr);
}

inline double secrecy_rate(double legit, double eve) { return std::max(0.0, legit - eve); }

// ---------------------------------------------------------------------------
// Asymptotic regimes

/// A limit that may not exist as a finite number.
struct Asymptote {
    double value = 0.0;
    bool divergent = false;

    static Asymptote diverges() { return {std::numeric_limits<double>::infinity(), true}; }
};

namespace detail {

/// log2(1 + num / den) with num = 0 giving 0 and den = 0 diverging.
inline Asymptote log_ratio(double num, double den) {
    if (num == 0.0) return {0.0, false};
    if (den == 0.0) return Asymptote::diverges();
    return {std::log2(1.0 + num / den), false};
}

}  // namespace detail

/// Secrecy rate as N_t grows without bound. Both channels become
/// interference-limited inside the cluster, so only the intra-cluster power
/// split matters. The strongest user has no residual interference and its
/// limit diverges. A channel whose correlation coefficient is zero carries
/// no desired signal at any N_t, so its limiting rate is 0.
inline Asymptote asymptotic_large_nt(const SystemConfig& c, const EstimationModel& model, std::size_t m,
                                     std::size_t n) {
    detail::check_user(c, m, n);
    const double p = c.tx(m, n);
    Asymptote legit{0.0, false};
    if (model.rho[m][n] > 0.0 && c.alpha(m, n) > 0.0)
        legit = detail::log_ratio(p, detail::stronger_power(c, m, n) +
                                         c.sic_residual_coeff * detail::weaker_power(c, m, n));
    Asymptote eve{0.0, false};
    if (model.eve_rho(m) > 0.0 && c.beta(m) > 0.0)
        eve = detail::log_ratio(p, detail::others_in_cluster(c, m, n));
    if (legit.divergent) return Asymptote::diverges();
    return {secrecy_rate(legit.value, eve.value), false};
}

/// Power split P_{m,n} = nu_{m,n} * total.
struct PowerFractions {
    /// nu[m][n - 1] for user n.
    Table nu;
    double total = 0.0;

    static PowerFractions from_config(const SystemConfig& c) {
        PowerFractions f;
        f.total = c.total_tx_power();
        f.nu = c.tx_power;
        for (auto& row : f.nu)
            for (auto& x : row) x /= f.total;
        return f;
    }

    double sum() const {
        double s = 0.0;
        for (const auto& row : nu)
            for (double x : row) s += x;
        return s;
    }

    bool valid() const {
        for (const auto& row : nu)
            for (double x : row)
                if (!(x >= 0.0)) return false;
        return std::abs(sum() - 1.0) <= 1e-12;
    }

    /// Writes nu * total into the transmit powers of a copy of `c`.
    SystemConfig apply(SystemConfig c) const {
        for (std::size_t m = 0; m < c.n_clusters; ++m)
            for (std::size_t i = 0; i < c.tx_power[m].size(); ++i) c.tx_power[m][i] = nu[m][i] * total;
        return c;
    }
};

/// Secrecy rate once the BS power dominates the noise: depends only on the
/// fractions, the correlation coefficients and N_t.
inline Asymptote asymptotic_high_power(const SystemConfig& c, const EstimationModel& model,
                                       const PowerFractions& fractions, std::size_t m, std::size_t n) {
    detail::check_user(c, m, n);
    if (!fractions.valid()) throw std::invalid_argument("asymptotic_high_power: fractions must sum to 1");
    const std::size_t nm = c.cluster_size(m);
    const auto& nu = fractions.nu;
    double stronger = 0.0, weaker = 0.0, others = 0.0, other_clusters = 0.0;
    for (std::size_t i = 1; i <= nm; ++i) {
        if (i < n) stronger += nu[m][i - 1];
        if (i > n) weaker += nu[m][i - 1];
        if (i != n) others += nu[m][i - 1];
    }
    for (std::size_t j = 0; j < c.n_clusters; ++j)
        if (j != m)
            for (double x : nu[j]) other_clusters += x;

    const double nt = static_cast<double>(c.n_antennas);
    const double own = nu[m][n - 1];
    const double rho = model.rho[m][n];
    const double rho_e = model.eve_rho(m);
    const Asymptote legit = detail::log_ratio(
        own * rho * nt, rho * nt * (stronger + c.sic_residual_coeff * weaker) + other_clusters);
    const Asymptote eve = detail::log_ratio(own * rho_e * nt, rho_e * nt * others + other_clusters);
    if (legit.divergent) return Asymptote::diverges();
    return {secrecy_rate(legit.value, eve.value), false};
}

/// Interference-free time-shared rate with full CSI: each of the K users owns
/// 1/K of the slots and the whole BS power during them.
inline double tdma_baseline_rate(const SystemConfig& c, std::size_t m, std::size_t n, double p_tot) {
    detail::check_user(c, m, n);
    const double k = static_cast<double>(c.total_users());
    return std::log2(1.0 + c.alpha(m, n) * p_tot * static_cast<double>(c.n_antennas) / kNoisePower) / k;
}

inline double tdma_baseline_rate(const SystemConfig& c, std::size_t m, std::size_t n) {
    return tdma_baseline_rate(c, m, n, c.total_tx_power());
}

// ---------------------------------------------------------------------------
// Reports

enum class RateMode { closed_form, monte_carlo, asymptotic_nt, asymptotic_power };

inline std::string_view to_string(RateMode mode) {
    switch (mode) {
        case RateMode::closed_form: return "closed-form";
        case RateMode::monte_carlo: return "monte-carlo";
        case RateMode::asymptotic_nt: return "asymptotic-Nt";
        case RateMode::asymptotic_power: return "asymptotic-power";
    }
    return "unknown";
}

struct UserRate {
    double legit = 0.0;
    double eve = 0.0;
    double secrecy = 0.0;
    bool divergent = false;
};

struct RateReport {
    RateMode mode = RateMode::closed_form;
    /// users[m][n - 1].
    std::vector<std::vector<UserRate>> users;
    std::vector<UserRate> cluster_sums;
    UserRate system_sum;

    /// Recomputes cluster and system sums from `users`.
    void finalize() {
        cluster_sums.assign(users.size(), UserRate{});
        system_sum = UserRate{};
        for (std::size_t m = 0; m < users.size(); ++m) {
            auto& cs = cluster_sums[m];
            for (const auto& u : users[m]) {
                cs.legit += u.legit;
                cs.eve += u.eve;
                cs.secrecy += u.secrecy;
                cs.divergent = cs.divergent || u.divergent;
            }
            system_sum.legit += cs.legit;
            system_sum.eve += cs.eve;
            system_sum.secrecy += cs.secrecy;
            system_sum.divergent = system_sum.divergent || cs.divergent;
        }
    }
};

inline RateReport analyze_closed_form(const SystemConfig& c, const EstimationModel& model) {
    RateReport report;
    report.mode = RateMode::closed_form;
    report.users.resize(c.n_clusters);
    for (std::size_t m = 0; m < c.n_clusters; ++m)
        for (std::size_t n = 1; n <= c.cluster_size(m); ++n) {
            UserRate u;
            u.legit = legit_rate_closed_form(c, model, m, n);
            u.eve = eve_rate_closed_form(c, model, m, n);
            u.secrecy = secrecy_rate(u.legit, u.eve);
            report.users[m].push_back(u);
        }
    report.finalize();
    return report;
}

inline RateReport analyze_closed_form(const SystemConfig& c) { return analyze_closed_form(c, compute_rho(c)); }

/// Large-N_t limits; only the secrecy column is populated.
inline RateReport analyze_asymptotic_nt(const SystemConfig& c, const EstimationModel& model) {
    RateReport report;
    report.mode = RateMode::asymptotic_nt;
    report.users.resize(c.n_clusters);
    for (std::size_t m = 0; m < c.n_clusters; ++m)
        for (std::size_t n = 1; n <= c.cluster_size(m); ++n) {
            const Asymptote a = asymptotic_large_nt(c, model, m, n);
            UserRate u;
            u.secrecy = a.value;
            u.divergent = a.divergent;
            report.users[m].push_back(u);
        }
    report.finalize();
    return report;
}

}  // namespace noma
