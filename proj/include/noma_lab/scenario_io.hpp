// SPDX-License-Identifier: Apache-2.0
//
// noma-lab: secure massive NOMA downlink simulator and power optimizer
// ------------------------------------------------------------------------

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "noma_lab/system_model.hpp"

namespace noma {

inline constexpr int kScenarioSchemaVersion = 1;

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Scenario file layout (plain text, '#' starts a comment):
//
//   schema_version = 1
//   n_antennas = 64
//   n_clusters = 12
//   pilot_length = 12
//   sic_residual_coeff = 0
//   enforce_power_order = false
//
//   [cluster]
//   size = 4
//   path_loss = <beta> <alpha_1> ... <alpha_N>
//   pilot_power = <U> <Q_1> ... <Q_N>
//   tx_power = <P_1> ... <P_N>
//
// One [cluster] block per cluster, in order. All values are linear.

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::string format_exact(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

inline SystemConfig parse_scenario(std::istream& in) {
    SystemConfig c;
    bool have_version = false, have_antennas = false, have_pilot = false;
    std::size_t declared_clusters = 0;
    bool have_declared_clusters = false;
    std::vector<bool> have_size;
    std::string line;
    std::size_t lineno = 0;
    bool in_cluster = false;

    auto fail = [&](const std::string& what) {
        throw ScenarioError("scenario line " + std::to_string(lineno) + ": " + what);
    };
    auto parse_double = [&](const std::string& tok) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            fail("not a number: '" + tok + "'");
        }
        if (used != tok.size()) fail("not a number: '" + tok + "'");
        return v;
    };
    auto parse_count = [&](const std::string& tok) {
        const double v = parse_double(tok);
        if (v < 0.0 || v != std::floor(v)) fail("expected a nonnegative integer: '" + tok + "'");
        return static_cast<std::size_t>(v);
    };
    auto parse_list = [&](const std::string& value) {
        std::vector<double> out;
        std::istringstream ss(value);
        std::string tok;
        while (ss >> tok) out.push_back(parse_double(tok));
        return out;
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        if (line == "[cluster]") {
            in_cluster = true;
            c.cluster_sizes.push_back(0);
            have_size.push_back(false);
            c.path_loss.emplace_back();
            c.pilot_power.emplace_back();
            c.tx_power.emplace_back();
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected 'key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));

        if (in_cluster) {
            const std::size_t m = c.cluster_sizes.size() - 1;
            if (key == "size") {
                c.cluster_sizes[m] = parse_count(value);
                have_size[m] = true;
            } else if (key == "path_loss") {
                c.path_loss[m] = parse_list(value);
            } else if (key == "pilot_power") {
                c.pilot_power[m] = parse_list(value);
            } else if (key == "tx_power") {
                c.tx_power[m] = parse_list(value);
            } else {
                fail("unknown cluster key '" + key + "'");
            }
            continue;
        }

        if (key == "schema_version") {
            if (parse_count(value) != static_cast<std::size_t>(kScenarioSchemaVersion))
                fail("unsupported schema_version " + value);
            have_version = true;
        } else if (key == "n_antennas") {
            c.n_antennas = parse_count(value);
            have_antennas = true;
        } else if (key == "n_clusters") {
            declared_clusters = parse_count(value);
            have_declared_clusters = true;
        } else if (key == "pilot_length") {
            c.pilot_length = parse_count(value);
            have_pilot = true;
        } else if (key == "sic_residual_coeff") {
            c.sic_residual_coeff = parse_double(value);
        } else if (key == "enforce_power_order") {
            if (value == "true")
                c.enforce_power_order = true;
            else if (value == "false")
                c.enforce_power_order = false;
            else
                fail("enforce_power_order must be true or false");
        } else {
            fail("unknown key '" + key + "'");
        }
    }

    if (!have_version) throw ScenarioError("scenario: missing schema_version");
    if (!have_antennas) throw ScenarioError("scenario: missing n_antennas");
    if (!have_pilot) throw ScenarioError("scenario: missing pilot_length");
    for (std::size_t m = 0; m < have_size.size(); ++m)
        if (!have_size[m]) throw ScenarioError("scenario: cluster " + std::to_string(m + 1) + " missing size");
    c.n_clusters = c.cluster_sizes.size();
    if (have_declared_clusters && declared_clusters != c.n_clusters)
        throw ScenarioError("scenario: n_clusters = " + std::to_string(declared_clusters) + " but " +
                            std::to_string(c.n_clusters) + " [cluster] blocks");
    return c;
}

inline SystemConfig load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
    return parse_scenario(in);
}

inline std::string write_scenario(const SystemConfig& c) {
    std::ostringstream out;
    auto list = [&](const std::vector<double>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << detail::format_exact(v[i]);
        out << '\n';
    };
    out << "# noma-lab scenario; linear powers relative to unit noise\n";
    out << "schema_version = " << kScenarioSchemaVersion << '\n';
    out << "n_antennas = " << c.n_antennas << '\n';
    out << "n_clusters = " << c.n_clusters << '\n';
    out << "pilot_length = " << c.pilot_length << '\n';
    out << "sic_residual_coeff = " << detail::format_exact(c.sic_residual_coeff) << '\n';
    out << "enforce_power_order = " << (c.enforce_power_order ? "true" : "false") << '\n';
    for (std::size_t m = 0; m < c.n_clusters; ++m) {
        out << "\n[cluster]\nsize = " << c.cluster_sizes[m] << '\n';
        out << "path_loss = ";
        list(c.path_loss[m]);
        out << "pilot_power = ";
        list(c.pilot_power[m]);
        out << "tx_power = ";
        list(c.tx_power[m]);
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Built-in scenarios

/// Knobs of the generated scenarios. Path losses are not taken from any
/// measurement: users in a cluster get log-spaced alpha from alpha_strong
/// (user 1) down to alpha_weak (user N), every cluster alike, and each
/// eavesdropper sits at eve_path_loss. Downlink power follows the
/// fixed-proportion split n / (1 + ... + N) of P_tot / M.
struct ScenarioParams {
    std::size_t n_antennas = 64;
    std::size_t n_clusters = 12;
    std::size_t cluster_size = 4;
    std::size_t pilot_length = 12;
    double psnr_db = 20.0;
    double qsnr_db = 10.0;
    double usnr_db = 10.0;
    double alpha_strong = 1.0;
    double alpha_weak = 0.1;
    double eve_path_loss = 0.5;
    double sic_residual_coeff = 0.0;
};

inline SystemConfig make_scenario(const ScenarioParams& p) {
    SystemConfig c;
    c.n_antennas = p.n_antennas;
    c.n_clusters = p.n_clusters;
    c.cluster_sizes.assign(p.n_clusters, p.cluster_size);
    c.pilot_length = p.pilot_length;
    c.sic_residual_coeff = p.sic_residual_coeff;

    const double q = db_to_linear(p.qsnr_db);
    const double u = db_to_linear(p.usnr_db);
    const double p_tot = db_to_linear(p.psnr_db);
    const double nm = static_cast<double>(p.cluster_size);
    const double share = p_tot / static_cast<double>(p.n_clusters);
    const double denom = nm * (nm + 1.0) / 2.0;

    for (std::size_t m = 0; m < p.n_clusters; ++m) {
        std::vector<double> alpha{p.eve_path_loss}, pilot{u}, tx;
        for (std::size_t n = 1; n <= p.cluster_size; ++n) {
            const double frac = p.cluster_size == 1 ? 0.0 : static_cast<double>(n - 1) / (nm - 1.0);
            alpha.push_back(p.alpha_strong * std::pow(p.alpha_weak / p.alpha_strong, frac));
            pilot.push_back(q);
            tx.push_back(static_cast<double>(n) / denom * share);
        }
        c.path_loss.push_back(std::move(alpha));
        c.pilot_power.push_back(std::move(pilot));
        c.tx_power.push_back(std::move(tx));
    }
    return c;
}

/// N_t = 64, M = 12, N_m = 4, tau = 12, PSNR 20 dB, QSNR 10 dB, USNR 10 dB.
inline SystemConfig default_scenario() { return make_scenario(ScenarioParams{}); }

}  // namespace noma
