// SPDX-License-Identifier: Apache-2.0
//
// noma-lab: secure massive NOMA downlink simulator and power optimizer
// ------------------------------------------------------------------------

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

#include "noma_lab/airlink.hpp"
#include "noma_lab/channel_estimation.hpp"
#include "noma_lab/rate_analysis.hpp"
#include "noma_lab/system_model.hpp"

namespace noma {

/// Trial-average of a per-user quantity.
struct McEstimate {
    /// mean[m][n - 1].
    Table mean;
    Table std_error;
    std::size_t trials = 0;
    std::uint64_t master_seed = 0;
};

struct McRates {
    McEstimate legit;
    McEstimate eve;
    /// Per-trial (R^o - R^e)^+ averaged, i.e. the ergodic secrecy rate itself.
    McEstimate secrecy;
};

inline constexpr std::size_t kMinTrials = 100;

struct McOptions {
    std::size_t threads = 1;
};

namespace detail {

/// Runs body(trial) for every trial on up to `threads` workers. Each trial
/// writes only its own output slot, so the schedule cannot affect results.
template <typename Body>
void for_each_trial(std::size_t trials, std::size_t threads, Body&& body) {
    threads = std::max<std::size_t>(1, std::min(threads, trials));
    if (threads == 1) {
        for (std::size_t t = 0; t < trials; ++t) body(t);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t t = w; t < trials; t += threads) body(t);
        });
    }
    for (auto& th : pool) th.join();
}

/// Mean and standard error per column of a row-major (trials x users)
/// sample matrix, accumulated in trial order.
inline void summarize(const std::vector<double>& samples, std::size_t trials, std::size_t users,
                      std::vector<double>& mean, std::vector<double>& std_error) {
    mean.assign(users, 0.0);
    std_error.assign(users, 0.0);
    for (std::size_t t = 0; t < trials; ++t)
        for (std::size_t u = 0; u < users; ++u) mean[u] += samples[t * users + u];
    for (auto& x : mean) x /= static_cast<double>(trials);
    std::vector<double> ss(users, 0.0);
    for (std::size_t t = 0; t < trials; ++t)
        for (std::size_t u = 0; u < users; ++u) {
            const double d = samples[t * users + u] - mean[u];
            ss[u] += d * d;
        }
    const double tn = static_cast<double>(trials);
    for (std::size_t u = 0; u < users; ++u) std_error[u] = std::sqrt(ss[u] / (tn - 1.0) / tn);
}

inline McEstimate reshape(const SystemConfig& c, const std::vector<double>& flat_mean,
                          const std::vector<double>& flat_se, std::size_t trials, std::uint64_t seed) {
    McEstimate e;
    e.trials = trials;
    e.master_seed = seed;
    std::size_t k = 0;
    for (std::size_t m = 0; m < c.n_clusters; ++m) {
        const std::size_t nm = c.cluster_size(m);
        e.mean.emplace_back(flat_mean.begin() + k, flat_mean.begin() + k + nm);
        e.std_error.emplace_back(flat_se.begin() + k, flat_se.begin() + k + nm);
        k += nm;
    }
    return e;
}

}  // namespace detail

/// Estimates the ergodic legitimate, eavesdropping and secrecy rates by
/// averaging log2(1 + SINR) over independent channel realizations.
///
/// Trial t consumes substream (master_seed, t). Results are bitwise
/// identical for any thread count.
inline McRates estimate_rates(const SystemConfig& c, std::size_t trials, std::uint64_t master_seed,
                              McOptions options = {}) {
    if (trials < kMinTrials) throw std::invalid_argument("estimate_rates: need at least 100 trials");
    const EstimationModel model = compute_rho(c);
    const std::size_t users = c.total_users();
    std::vector<double> legit(trials * users), eve(trials * users), secrecy(trials * users);

    detail::for_each_trial(trials, options.threads, [&](std::size_t t) {
        const auto realization = simulate_estimation(c, model, SeedSpec{master_seed, t});
        const auto beams = make_beams(realization);
        const auto sinr = instantaneous_sinr(c, realization, beams);
        std::size_t k = t * users;
        for (std::size_t m = 0; m < c.n_clusters; ++m)
            for (std::size_t i = 0; i < c.cluster_size(m); ++i, ++k) {
                const double ro = std::log2(1.0 + sinr.legit_sinr[m][i]);
                const double re = std::log2(1.0 + sinr.eve_sinr[m][i]);
                legit[k] = ro;
                eve[k] = re;
                secrecy[k] = secrecy_rate(ro, re);
            }
    });

    McRates out;
    std::vector<double> mean, se;
    detail::summarize(legit, trials, users, mean, se);
    out.legit = detail::reshape(c, mean, se, trials, master_seed);
    detail::summarize(eve, trials, users, mean, se);
    out.eve = detail::reshape(c, mean, se, trials, master_seed);
    detail::summarize(secrecy, trials, users, mean, se);
    out.secrecy = detail::reshape(c, mean, se, trials, master_seed);
    return out;
}

/// Monte Carlo averages next to the closed-form lower bound for one user.
struct GapRow {
    std::size_t cluster = 0;  // zero-based
    std::size_t user = 0;     // 1..N_m
    double mc_legit = 0.0, mc_legit_se = 0.0;
    double mc_eve = 0.0, mc_eve_se = 0.0;
    double mc_secrecy = 0.0, mc_secrecy_se = 0.0;
    double cf_legit = 0.0, cf_eve = 0.0, cf_secrecy = 0.0;
    /// mc_secrecy - cf_secrecy.
    double gap = 0.0;
    /// The bound exceeds the simulated secrecy rate by more than 2 standard errors.
    bool bound_violated = false;
};

inline std::vector<GapRow> secrecy_gap_report(const SystemConfig& c, const McRates& mc) {
    const auto cf = analyze_closed_form(c);
    std::vector<GapRow> rows;
    for (std::size_t m = 0; m < c.n_clusters; ++m)
        for (std::size_t i = 0; i < c.cluster_size(m); ++i) {
            GapRow r;
            r.cluster = m;
            r.user = i + 1;
            r.mc_legit = mc.legit.mean[m][i];
            r.mc_legit_se = mc.legit.std_error[m][i];
            r.mc_eve = mc.eve.mean[m][i];
            r.mc_eve_se = mc.eve.std_error[m][i];
            r.mc_secrecy = mc.secrecy.mean[m][i];
            r.mc_secrecy_se = mc.secrecy.std_error[m][i];
            r.cf_legit = cf.users[m][i].legit;
            r.cf_eve = cf.users[m][i].eve;
            r.cf_secrecy = cf.users[m][i].secrecy;
            r.gap = r.mc_secrecy - r.cf_secrecy;
            r.bound_violated = r.cf_secrecy > r.mc_secrecy + 2.0 * r.mc_secrecy_se;
            rows.push_back(r);
        }
    return rows;
}

inline std::vector<GapRow> secrecy_gap_report(const SystemConfig& c, std::size_t trials,
                                              std::uint64_t master_seed, McOptions options = {}) {
    return secrecy_gap_report(c, estimate_rates(c, trials, master_seed, options));
}

}  // namespace noma
