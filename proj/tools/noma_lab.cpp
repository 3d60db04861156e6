// SPDX-License-Identifier: Apache-2.0
//
// noma-lab: secure massive NOMA downlink simulator and power optimizer
// ------------------------------------------------------------------------
//
// Command-line front end. Every command writes one CSV table to --out or
// stdout and exits nonzero on any error.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "noma_lab/experiments.hpp"

namespace {

constexpr const char* kColumns = R"(Commands and CSV columns:
  analyze   cluster,user,legit,eve,secrecy,secrecy_large_nt,secrecy_high_power
            closed-form rates in bit/s/Hz; inf marks a divergent limit
  simulate  cluster,user,mc_legit,mc_legit_se,mc_eve,mc_eve_se,mc_secrecy,
            mc_secrecy_se,cf_legit,cf_eve,cf_secrecy,gap,bound_violated
  optimize  problem,status,cluster,user,power,legit,eve,secrecy,target_legit,
            eve_cap,objective   (one NA row when infeasible)
  sweep     axis,value,series,sum_legit,sum_eve,sum_secrecy
            series: closed_form, monte_carlo (with --trials), tdma_baseline
  preset    fig2..fig5 use the sweep columns; fig6 and fig7 use
            axis,value,series,metric,result with NA for infeasible points

Sweep axes: n_antennas, psnr (dB), usnr (dB), cluster-mode (number of clusters).
Without --scenario the built-in default scenario is used.
NOMA_LAB_THREADS caps worker threads (default 1).)";

std::size_t thread_cap() {
    const char* env = std::getenv("NOMA_LAB_THREADS");
    if (!env || !*env) return 1;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (*end != '\0' || v == 0) throw std::invalid_argument("NOMA_LAB_THREADS must be a positive integer");
    return static_cast<std::size_t>(v);
}

struct Sweep {
    noma::SweepAxis axis;
    std::vector<double> values;
};

Sweep parse_sweep(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--sweep expects AXIS=v1,v2,...");
    const auto axis = noma::parse_axis(text.substr(0, eq));
    if (!axis) throw std::invalid_argument("unknown sweep axis '" + text.substr(0, eq) + "'");
    Sweep s{*axis, {}};
    std::stringstream list(text.substr(eq + 1));
    std::string tok;
    while (std::getline(list, tok, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != tok.size()) throw std::invalid_argument("bad sweep value '" + tok + "'");
        s.values.push_back(v);
    }
    noma::check_increasing(s.values);
    return s;
}

void emit(const noma::CsvTable& table, const std::string& out) {
    const std::string text = table.str();
    if (out.empty() || out == "-") {
        std::cout << text;
        std::cout.flush();
        if (!std::cout) throw std::runtime_error("cannot write to stdout");
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file '" + out + "'");
    f << text;
    f.close();
    if (!f) throw std::runtime_error("cannot write output file '" + out + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"noma-lab: secure massive NOMA downlink analysis, simulation and power optimization"};
    app.footer(kColumns);

    std::string command, target, scenario_path, sweep_text, out, problem = "op4", search = "bisection";
    std::optional<std::size_t> trials;
    std::uint64_t seed = 1;
    double delta_o = 0.01;
    std::optional<double> r_e, r_o, qsnr, qmax, psnr, ptot, usnr;

    app.add_option("command", command, "analyze | simulate | optimize | sweep | preset")
        ->required()
        ->check(CLI::IsMember({"analyze", "simulate", "optimize", "sweep", "preset"}));
    app.add_option("preset", target, "preset name for the preset command (fig2..fig7)");
    app.add_option("--scenario", scenario_path, "scenario file (schema_version = 1)");
    app.add_option("--sweep", sweep_text, "AXIS=v1,v2,... strictly increasing");
    app.add_option("--trials", trials, "Monte Carlo trials, at least 100 (simulate default 10000)");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--out", out, "output CSV path (default stdout)");
    app.add_option("--delta-o", delta_o, "outer search step for op2/op4")->check(CLI::PositiveNumber);
    app.add_option("--re", r_e, "eavesdropping-rate cap r^e in bit/s/Hz");
    app.add_option("--ro", r_o, "legitimate-rate target r^o for op3/op5");
    app.add_option("--problem", problem, "op2 | op3 | op4 | op5")
        ->check(CLI::IsMember({"op2", "op3", "op4", "op5"}));
    app.add_option("--search", search, "bisection | stepped")->check(CLI::IsMember({"bisection", "stepped"}));
    auto* qsnr_opt = app.add_option("--qsnr", qsnr, "pilot cap for op2/op3 in dB");
    app.add_option("--qmax", qmax, "pilot cap for op2/op3, linear")->excludes(qsnr_opt);
    auto* psnr_opt = app.add_option("--psnr", psnr, "BS budget for op4/op5 in dB");
    app.add_option("--ptot", ptot, "BS budget for op4/op5, linear")->excludes(psnr_opt);
    app.add_option("--usnr", usnr, "eavesdropper pilot power for presets fig6/fig7 in dB (default -5)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        const std::size_t threads = thread_cap();
        const noma::SystemConfig config =
            scenario_path.empty() ? noma::default_scenario() : noma::load_scenario(scenario_path);
        noma::require_valid(config);
        if (command != "preset" && !target.empty())
            throw std::invalid_argument("unexpected argument '" + target + "'");

        if (command == "analyze") {
            emit(noma::analyze_table(config), out);
        } else if (command == "simulate") {
            emit(noma::simulate_table(config, trials.value_or(10000), seed, threads), out);
        } else if (command == "optimize") {
            noma::OptimizeSpec spec;
            spec.problem = *noma::parse_problem(problem);
            spec.delta_o = delta_o;
            spec.search = search == "stepped" ? noma::SearchMode::stepped : noma::SearchMode::bisection;
            if (!r_e) throw std::invalid_argument("optimize needs --re");
            spec.r_e = *r_e;
            const bool min_power = spec.problem == noma::Problem::op3 || spec.problem == noma::Problem::op5;
            if (min_power && !r_o) throw std::invalid_argument(std::string(noma::to_string(spec.problem)) +
                                                               " needs --ro");
            if (!min_power && r_o) throw std::invalid_argument("--ro applies to op3 and op5 only");
            spec.r_o = r_o.value_or(0.0);
            if (spec.r_e < 0.0 || spec.r_o < 0.0) throw std::invalid_argument("rate targets must be nonnegative");
            spec.q_max = qmax ? *qmax : qsnr ? noma::db_to_linear(*qsnr) : noma::strongest_user_pilot(config);
            spec.p_tot = ptot ? *ptot : psnr ? noma::db_to_linear(*psnr) : config.total_tx_power();
            emit(noma::optimize_table(config, spec), out);
        } else if (command == "sweep") {
            if (sweep_text.empty()) throw std::invalid_argument("sweep needs --sweep AXIS=v1,v2,...");
            const Sweep s = parse_sweep(sweep_text);
            noma::SweepOptions opt;
            opt.trials = trials.value_or(0);
            opt.seed = seed;
            opt.threads = threads;
            emit(noma::sweep_table(config, s.axis, s.values, opt), out);
        } else {
            if (target.empty()) throw std::invalid_argument("preset needs a name (fig2..fig7)");
            noma::PresetOptions opt;
            opt.trials = trials.value_or(opt.trials);
            if (opt.trials < noma::kMinTrials) throw std::invalid_argument("--trials must be at least 100");
            opt.seed = seed;
            opt.threads = threads;
            opt.delta_o = delta_o;
            opt.r_e = r_e;
            if (qmax) opt.q_max = *qmax;
            if (qsnr) opt.q_max = noma::db_to_linear(*qsnr);
            if (usnr) opt.usnr_db = *usnr;
            emit(noma::preset_table(target, config, opt), out);
        }
    } catch (const std::exception& e) {
        std::cerr << "noma-lab: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
