// SPDX-License-Identifier: Apache-2.0
//
// noma-lab: secure massive NOMA downlink simulator and power optimizer
// ------------------------------------------------------------------------

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "noma_lab/monte_carlo.hpp"
#include "noma_lab/power_optimizer.hpp"
#include "noma_lab/rate_analysis.hpp"
#include "noma_lab/scenario_io.hpp"
#include "noma_lab/system_model.hpp"

namespace noma {

// ---------------------------------------------------------------------------
// CSV

inline constexpr std::string_view kNa = "NA";

/// 12 significant digits; NaN prints as NA.
inline std::string csv_number(double v) {
    if (std::isnan(v)) return std::string(kNa);
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string csv_number(std::size_t v) { return std::to_string(v); }

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row) {
        if (row.size() != header.size()) throw std::logic_error("csv row width mismatch");
        rows.push_back(std::move(row));
    }

    std::string str() const {
        std::string out;
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (i) out += ',';
                out += cells[i];
            }
            out += '\n';
        };
        line(header);
        for (const auto& r : rows) line(r);
        return out;
    }
};

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ---------------------------------------------------------------------------
// Scenario edits used by sweeps

enum class SweepAxis { n_antennas, psnr, usnr, cluster_mode };

inline std::string_view to_string(SweepAxis a) {
    switch (a) {
        case SweepAxis::n_antennas: return "n_antennas";
        case SweepAxis::psnr: return "psnr";
        case SweepAxis::usnr: return "usnr";
        case SweepAxis::cluster_mode: return "cluster-mode";
    }
    return "unknown";
}

inline std::optional<SweepAxis> parse_axis(std::string_view s) {
    if (s == "n_antennas") return SweepAxis::n_antennas;
    if (s == "psnr") return SweepAxis::psnr;
    if (s == "usnr") return SweepAxis::usnr;
    if (s == "cluster-mode") return SweepAxis::cluster_mode;
    return std::nullopt;
}

/// Generator knobs that reproduce the coarse shape of `c`: extreme user path
/// losses, cluster-1 eavesdropper, strongest pilots and total BS power.
inline ScenarioParams infer_params(const SystemConfig& c) {
    ScenarioParams p;
    p.n_antennas = c.n_antennas;
    p.n_clusters = c.n_clusters;
    p.cluster_size = c.n_clusters ? c.cluster_size(0) : 0;
    p.pilot_length = c.pilot_length;
    p.sic_residual_coeff = c.sic_residual_coeff;
    double a_max = 0.0, a_min = std::numeric_limits<double>::infinity(), q_max = 0.0, u_max = 0.0;
    for (std::size_t m = 0; m < c.n_clusters; ++m) {
        u_max = std::max(u_max, c.attack_power(m));
        for (std::size_t n = 1; n <= c.cluster_size(m); ++n) {
            a_max = std::max(a_max, c.alpha(m, n));
            a_min = std::min(a_min, c.alpha(m, n));
            q_max = std::max(q_max, c.pilot(m, n));
        }
    }
    p.alpha_strong = a_max;
    p.alpha_weak = a_min;
    p.eve_path_loss = c.n_clusters ? c.beta(0) : p.eve_path_loss;
    p.psnr_db = linear_to_db(c.total_tx_power());
    p.qsnr_db = linear_to_db(q_max);
    p.usnr_db = linear_to_db(u_max);
    return p;
}

/// Copy of `c` with P_tot = 10^(psnr_db / 10), keeping the power split; a
/// scenario without BS power gets the fixed-proportion split.
inline SystemConfig with_psnr(SystemConfig c, double psnr_db) {
    const double target = db_to_linear(psnr_db);
    const double total = c.total_tx_power();
    if (total > 0.0) {
        for (auto& row : c.tx_power)
            for (auto& p : row) p *= target / total;
        return c;
    }
    return fixed_proportion_allocation(std::move(c), target);
}

/// Copy of `c` with every eavesdropper pilot at 10^(usnr_db / 10).
inline SystemConfig with_usnr(SystemConfig c, double usnr_db) {
    for (auto& row : c.pilot_power) row[0] = db_to_linear(usnr_db);
    return c;
}

inline std::size_t as_count(double v, const char* what) {
    if (!(v >= 1.0) || v != std::floor(v) || v > 1e9)
        throw std::invalid_argument(std::string(what) + " must be a positive integer");
    return static_cast<std::size_t>(v);
}

/// Applies one sweep point. cluster-mode regenerates the scenario from
/// infer_params() with the same K split into `value` equal clusters.
inline SystemConfig apply_axis(const SystemConfig& base, SweepAxis axis, double value) {
    switch (axis) {
        case SweepAxis::n_antennas: {
            SystemConfig c = base;
            c.n_antennas = as_count(value, "n_antennas");
            return c;
        }
        case SweepAxis::psnr: return with_psnr(base, value);
        case SweepAxis::usnr: return with_usnr(base, value);
        case SweepAxis::cluster_mode: {
            const std::size_t m = as_count(value, "cluster-mode");
            const std::size_t k = base.total_users();
            if (k % m != 0)
                throw std::invalid_argument("cluster-mode " + std::to_string(m) + " does not divide K = " +
                                            std::to_string(k));
            ScenarioParams p = infer_params(base);
            p.n_clusters = m;
            p.cluster_size = k / m;
            return make_scenario(p);
        }
    }
    throw std::invalid_argument("unknown sweep axis");
}

inline void check_increasing(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("sweep needs at least one value");
    for (std::size_t i = 1; i < values.size(); ++i)
        if (!(values[i] > values[i - 1])) throw std::invalid_argument("sweep values must be strictly increasing");
}

// ---------------------------------------------------------------------------
// Commands

inline void require_valid(const SystemConfig& c) {
    const auto report = validate(c);
    if (!report.ok) throw std::invalid_argument("invalid scenario: " + report.message);
}

/// cluster,user,legit,eve,secrecy,secrecy_large_nt,secrecy_high_power
/// (closed form; user 1 has no finite large-N_t limit and prints inf).
inline CsvTable analyze_table(const SystemConfig& c) {
    require_valid(c);
    const auto model = compute_rho(c);
    const auto report = analyze_closed_form(c, model);
    const auto fractions = PowerFractions::from_config(c);
    CsvTable t;
    t.header = {"cluster", "user", "legit", "eve", "secrecy", "secrecy_large_nt", "secrecy_high_power"};
    for (std::size_t m = 0; m < c.n_clusters; ++m)
        for (std::size_t n = 1; n <= c.cluster_size(m); ++n) {
            const auto& u = report.users[m][n - 1];
            const Asymptote a = asymptotic_large_nt(c, model, m, n);
            double hp = kNaN;
            if (fractions.total > 0.0) {
                const Asymptote h = asymptotic_high_power(c, model, fractions, m, n);
                hp = h.divergent ? std::numeric_limits<double>::infinity() : h.value;
            }
            t.add({csv_number(m + 1), csv_number(n), csv_number(u.legit), csv_number(u.eve), csv_number(u.secrecy),
                   csv_number(a.divergent ? std::numeric_limits<double>::infinity() : a.value), csv_number(hp)});
        }
    return t;
}

/// Per-user Monte Carlo means and standard errors next to the closed form.
inline CsvTable simulate_table(const SystemConfig& c, std::size_t trials, std::uint64_t seed,
                               std::size_t threads) {
    require_valid(c);
    const auto rows = secrecy_gap_report(c, trials, seed, McOptions{threads});
    CsvTable t;
    t.header = {"cluster",   "user",      "mc_legit",   "mc_legit_se", "mc_eve", "mc_eve_se", "mc_secrecy",
                "mc_secrecy_se", "cf_legit", "cf_eve", "cf_secrecy", "gap", "bound_violated"};
    for (const auto& r : rows)
        t.add({csv_number(r.cluster + 1), csv_number(r.user), csv_number(r.mc_legit), csv_number(r.mc_legit_se),
               csv_number(r.mc_eve), csv_number(r.mc_eve_se), csv_number(r.mc_secrecy),
               csv_number(r.mc_secrecy_se), csv_number(r.cf_legit), csv_number(r.cf_eve),
               csv_number(r.cf_secrecy), csv_number(r.gap), r.bound_violated ? "1" : "0"});
    return t;
}

enum class Problem { op2, op3, op4, op5 };

inline std::optional<Problem> parse_problem(std::string_view s) {
    if (s == "op2") return Problem::op2;
    if (s == "op3") return Problem::op3;
    if (s == "op4") return Problem::op4;
    if (s == "op5") return Problem::op5;
    return std::nullopt;
}

inline std::string_view to_string(Problem p) {
    switch (p) {
        case Problem::op2: return "op2";
        case Problem::op3: return "op3";
        case Problem::op4: return "op4";
        case Problem::op5: return "op5";
    }
    return "unknown";
}

struct OptimizeSpec {
    Problem problem = Problem::op4;
    double r_e = 0.0;
    double r_o = 0.0;
    double delta_o = 0.01;
    /// Pilot cap for op2/op3; budget for op4/op5.
    double q_max = 0.0;
    double p_tot = 0.0;
    SearchMode search = SearchMode::bisection;
};

/// problem,status,cluster,user,power,legit,eve,secrecy,target_legit,eve_cap,objective
/// One row per user; a single NA row when the problem is infeasible.
inline CsvTable optimize_table(const SystemConfig& c, const OptimizeSpec& spec) {
    require_valid(c);
    const auto model = compute_rho(c);
    PowerSolution s;
    switch (spec.problem) {
        case Problem::op2: s = op2_maxmin_q(c, spec.r_e, spec.q_max, spec.delta_o, spec.search); break;
        case Problem::op3: s = op3_minpower_q(c, spec.r_e, spec.r_o, spec.q_max); break;
        case Problem::op4: s = op4_maxmin_p(c, model, spec.r_e, spec.p_tot, spec.delta_o, spec.search); break;
        case Problem::op5: s = op5_minpower_p(c, model, spec.r_e, spec.r_o, spec.p_tot); break;
    }
    CsvTable t;
    t.header = {"problem", "status", "cluster", "user", "power", "legit", "eve", "secrecy",
                "target_legit", "eve_cap", "objective"};
    const std::string name(to_string(spec.problem));
    const std::string status(to_string(s.status));
    if (!s.ok()) {
        t.add({name, status, std::string(kNa), std::string(kNa), std::string(kNa), std::string(kNa),
               std::string(kNa), std::string(kNa), csv_number(spec.problem == Problem::op3 || spec.problem == Problem::op5
                                                                  ? spec.r_o
                                                                  : kNaN),
               csv_number(spec.r_e), std::string(kNa)});
        return t;
    }
    SystemConfig applied = c;
    const bool pilot = spec.problem == Problem::op2 || spec.problem == Problem::op3;
    if (pilot)
        applied = with_pilot_powers(c, UserLayout(c).flatten(s.powers));
    else
        applied.tx_power = s.powers;
    const auto report = analyze_closed_form(applied, pilot ? compute_rho(applied) : model);
    for (std::size_t m = 0; m < c.n_clusters; ++m)
        for (std::size_t n = 1; n <= c.cluster_size(m); ++n) {
            const auto& u = report.users[m][n - 1];
            t.add({name, status, csv_number(m + 1), csv_number(n), csv_number(s.powers[m][n - 1]),
                   csv_number(u.legit), csv_number(u.eve), csv_number(u.secrecy), csv_number(s.min_legit_rate),
                   csv_number(s.eve_cap), csv_number(s.objective)});
        }
    return t;
}

// ---------------------------------------------------------------------------
// Sweeps

struct SweepOptions {
    /// Monte Carlo series when >= kMinTrials; 0 disables it.
    std::size_t trials = 0;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    bool tdma = true;
    /// Appended to every series name.
    std::string series_suffix;
};

inline std::vector<std::string> sum_row(std::string_view axis, double value, const std::string& series,
                                        double legit, double eve, double secrecy) {
    return {std::string(axis), csv_number(value), series, csv_number(legit), csv_number(eve), csv_number(secrecy)};
}

inline const std::vector<std::string>& sweep_header() {
    static const std::vector<std::string> h{"axis", "value", "series", "sum_legit", "sum_eve", "sum_secrecy"};
    return h;
}

/// Long-format sums per sweep point and series:
///   closed_form    closed-form rates
///   monte_carlo    trial averages (same master seed at every point)
///   tdma_baseline  interference-free time sharing; sum_eve is NA and
///                  sum_secrecy repeats sum_legit
/// Points run in parallel when Monte Carlo is off; rows keep sweep order.
inline void sweep_into(CsvTable& t, const SystemConfig& base, SweepAxis axis, const std::vector<double>& values,
                       const SweepOptions& opt) {
    check_increasing(values);
    if (opt.trials != 0 && opt.trials < kMinTrials)
        throw std::invalid_argument("monte carlo sweeps need at least 100 trials");
    std::vector<SystemConfig> configs;
    for (double v : values) {
        configs.push_back(apply_axis(base, axis, v));
        require_valid(configs.back());
    }
    std::vector<std::vector<std::vector<std::string>>> rows(values.size());
    const std::string_view name = to_string(axis);
    auto point = [&](std::size_t i, std::size_t mc_threads) {
        const auto& c = configs[i];
        const auto cf = analyze_closed_form(c).system_sum;
        rows[i].push_back(sum_row(name, values[i], "closed_form" + opt.series_suffix, cf.legit, cf.eve, cf.secrecy));
        if (opt.trials) {
            const auto mc = estimate_rates(c, opt.trials, opt.seed, McOptions{mc_threads});
            double l = 0.0, e = 0.0, s = 0.0;
            for (std::size_t m = 0; m < c.n_clusters; ++m)
                for (std::size_t n = 0; n < c.cluster_size(m); ++n) {
                    l += mc.legit.mean[m][n];
                    e += mc.eve.mean[m][n];
                    s += mc.secrecy.mean[m][n];
                }
            rows[i].push_back(sum_row(name, values[i], "monte_carlo" + opt.series_suffix, l, e, s));
        }
        if (opt.tdma) {
            double r = 0.0;
            for (std::size_t m = 0; m < c.n_clusters; ++m)
                for (std::size_t n = 1; n <= c.cluster_size(m); ++n) r += tdma_baseline_rate(c, m, n);
            rows[i].push_back(sum_row(name, values[i], "tdma_baseline" + opt.series_suffix, r, kNaN, r));
        }
    };
    if (opt.trials) {
        for (std::size_t i = 0; i < values.size(); ++i) point(i, opt.threads);
    } else {
        detail::for_each_trial(values.size(), opt.threads, [&](std::size_t i) { point(i, 1); });
    }
    for (auto& group : rows)
        for (auto& r : group) t.add(std::move(r));
}

inline CsvTable sweep_table(const SystemConfig& base, SweepAxis axis, const std::vector<double>& values,
                            const SweepOptions& opt) {
    CsvTable t;
    t.header = sweep_header();
    sweep_into(t, base, axis, values, opt);
    return t;
}

// ---------------------------------------------------------------------------
// Presets

inline std::vector<double> linspace_step(double lo, double hi, double step) {
    std::vector<double> v;
    const auto n = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
    for (std::size_t k = 0; k <= n; ++k) v.push_back(lo + static_cast<double>(k) * step);
    return v;
}

struct PresetOptions {
    std::size_t trials = 1000;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    double delta_o = 0.01;
    /// Overrides the calibrated eavesdropping cap of fig6.
    std::optional<double> r_e;
    /// Pilot cap for fig6; defaults to the strongest configured user pilot.
    std::optional<double> q_max;
    /// Eavesdropper pilot power (dB) imposed by fig6 and fig7; unset keeps
    /// the scenario's attack powers.
    std::optional<double> usnr_db = -5.0;
};

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names{"fig2", "fig3", "fig4", "fig5", "fig6", "fig7"};
    return names;
}

/// PSNR 0..40 dB: closed form, Monte Carlo and TDMA baseline.
inline CsvTable preset_fig2(const SystemConfig& base, const PresetOptions& o) {
    SweepOptions s{o.trials, o.seed, o.threads, true, ""};
    return sweep_table(base, SweepAxis::psnr, linspace_step(0.0, 40.0, 5.0), s);
}

/// N_t = 16..4096 at PSNR 0, 10 and 20 dB, closed form.
inline CsvTable preset_fig3(const SystemConfig& base, const PresetOptions& o) {
    CsvTable t;
    t.header = sweep_header();
    std::vector<double> nts;
    for (double n = 16; n <= 4096; n *= 2) nts.push_back(n);
    for (double psnr : {0.0, 10.0, 20.0}) {
        char suffix[32];
        std::snprintf(suffix, sizeof suffix, "@psnr=%gdB", psnr);
        sweep_into(t, with_psnr(base, psnr), SweepAxis::n_antennas, nts, {0, o.seed, o.threads, false, suffix});
    }
    return t;
}

/// USNR -10..20 dB at QSNR -5 dB for N_t = 64, 128, 256, closed form.
inline CsvTable preset_fig4(const SystemConfig& base, const PresetOptions& o) {
    CsvTable t;
    t.header = sweep_header();
    SystemConfig c = base;
    for (std::size_t m = 0; m < c.n_clusters; ++m)
        for (std::size_t n = 1; n <= c.cluster_size(m); ++n) c.pilot_power[m][n] = db_to_linear(-5.0);
    for (std::size_t nt : {64u, 128u, 256u}) {
        c.n_antennas = nt;
        sweep_into(t, c, SweepAxis::usnr, linspace_step(-10.0, 20.0, 2.5),
                   {0, o.seed, o.threads, false, "@n_antennas=" + std::to_string(nt)});
    }
    return t;
}

/// K = 48 users in 24, 16 or 12 clusters with tau = 24, PSNR 0..40 dB.
inline CsvTable preset_fig5(const SystemConfig& base, const PresetOptions& o) {
    CsvTable t;
    t.header = sweep_header();
    ScenarioParams p = infer_params(base);
    p.pilot_length = 24;
    for (std::size_t m : {24u, 16u, 12u}) {
        p.n_clusters = m;
        p.cluster_size = 48 / m;
        sweep_into(t, make_scenario(p), SweepAxis::psnr, linspace_step(0.0, 40.0, 5.0),
                   {0, o.seed, o.threads, false, "@clusters=" + std::to_string(m)});
    }
    return t;
}

inline const std::vector<std::string>& metric_header() {
    static const std::vector<std::string> h{"axis", "value", "series", "metric", "result"};
    return h;
}

inline double strongest_user_pilot(const SystemConfig& c) {
    double q = 0.0;
    for (std::size_t m = 0; m < c.n_clusters; ++m)
        for (std::size_t n = 1; n <= c.cluster_size(m); ++n) q = std::max(q, c.pilot(m, n));
    return q;
}

/// Largest margin min legit - r_e a common pilot power on a 200-point grid
/// over (0, q_max] reaches while every eavesdropping rate stays at most r_e;
/// negative when no grid point qualifies.
inline double equal_pilot_reach(const SystemConfig& c, double r_e, double q_max) {
    double best = -1.0;
    for (int k = 1; k <= 200; ++k) {
        const auto applied = equal_pilot_powers(c, q_max * k / 200.0);
        const auto rc = closed_form_extremes(applied, compute_rho(applied));
        if (rc.max_eve <= r_e) best = std::max(best, rc.min_legit - r_e);
    }
    return best;
}

/// Total pilot power against the required secrecy margin r^o - r^e:
/// op3 (minimum-power LP) and equal_pilot (smallest common pilot power).
/// Unless given, r^e is the 0.05-grid cap where common pilots reach the
/// largest margin; targets are 10%..100% of that margin.
inline CsvTable preset_fig6(const SystemConfig& scenario, const PresetOptions& o) {
    const SystemConfig base = o.usnr_db ? with_usnr(scenario, *o.usnr_db) : scenario;
    require_valid(base);
    const double q_max = o.q_max.value_or(strongest_user_pilot(base));
    double r_e = o.r_e.value_or(0.0), reach = -1.0;
    if (o.r_e) {
        reach = equal_pilot_reach(base, r_e, q_max);
    } else {
        for (int k = 0; k <= 40; ++k) {
            const double cap = 0.05 * k;
            const double m = equal_pilot_reach(base, cap, q_max);
            if (m > reach) {
                reach = m;
                r_e = cap;
            }
        }
    }
    CsvTable t;
    t.header = metric_header();
    if (!(reach > 0.0)) {
        t.add({"required_secrecy", std::string(kNa), "op3", "total_pilot_power", std::string(kNa)});
        t.add({"required_secrecy", std::string(kNa), "equal_pilot", "total_pilot_power", std::string(kNa)});
        return t;
    }
    const std::size_t k_users = base.total_users();
    for (int k = 1; k <= 10; ++k) {
        const double target = reach * k / 10.0;
        const double r_o = r_e + target;
        const auto s = op3_minpower_q(base, r_e, r_o, q_max);
        t.add({"required_secrecy", csv_number(target), "op3", "total_pilot_power",
               csv_number(s.ok() ? s.objective : kNaN)});
        const auto q = min_equal_pilot_power(base, r_e, r_o, q_max);
        t.add({"required_secrecy", csv_number(target), "equal_pilot", "total_pilot_power",
               csv_number(q ? *q * static_cast<double>(k_users) : kNaN)});
    }
    return t;
}

inline double min_user_secrecy(const SystemConfig& c, const EstimationModel& model) {
    const auto r = analyze_closed_form(c, model);
    double s = std::numeric_limits<double>::infinity();
    for (const auto& cl : r.users)
        for (const auto& u : cl) s = std::min(s, u.secrecy);
    return s;
}

/// Minimum per-user secrecy rate against PSNR 0..40 dB: op4 (guaranteed
/// margin r^o - r^e, best cap on a grid), fixed_proportion and equal.
inline CsvTable preset_fig7(const SystemConfig& scenario, const PresetOptions& o) {
    const SystemConfig base = o.usnr_db ? with_usnr(scenario, *o.usnr_db) : scenario;
    require_valid(base);
    const auto model = compute_rho(base);
    const auto psnrs = linspace_step(0.0, 40.0, 5.0);
    std::vector<std::vector<std::vector<std::string>>> rows(psnrs.size());
    detail::for_each_trial(psnrs.size(), o.threads, [&](std::size_t i) {
        const double p_tot = db_to_linear(psnrs[i]);
        const auto scan = op4_secrecy_scan(base, model, p_tot, o.delta_o, 0.02);
        const std::string v = csv_number(psnrs[i]);
        rows[i].push_back({"psnr", v, "op4", "min_user_secrecy", csv_number(scan.best.ok() ? scan.margin : kNaN)});
        rows[i].push_back({"psnr", v, "fixed_proportion", "min_user_secrecy",
                           csv_number(min_user_secrecy(fixed_proportion_allocation(base, p_tot), model))});
        rows[i].push_back({"psnr", v, "equal", "min_user_secrecy",
                           csv_number(min_user_secrecy(equal_allocation(base, p_tot), model))});
    });
    CsvTable t;
    t.header = metric_header();
    for (auto& group : rows)
        for (auto& r : group) t.add(std::move(r));
    return t;
}

inline CsvTable preset_table(std::string_view name, const SystemConfig& base, const PresetOptions& o) {
    if (name == "fig2") return preset_fig2(base, o);
    if (name == "fig3") return preset_fig3(base, o);
    if (name == "fig4") return preset_fig4(base, o);
    if (name == "fig5") return preset_fig5(base, o);
    if (name == "fig6") return preset_fig6(base, o);
    if (name == "fig7") return preset_fig7(base, o);
    throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

}  // namespace noma
