// SPDX-License-Identifier: Apache-2.0
//
// noma-lab: secure massive NOMA downlink simulator and power optimizer
// ------------------------------------------------------------------------

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace noma {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;
using Table = std::vector<std::vector<double>>;

/// Receiver noise power. Every power in the library is a linear SNR against it.
inline constexpr double kNoisePower = 1.0;

/// Scenario ground truth.
///
/// Per-cluster lists follow one indexing convention: `path_loss[m]` and
/// `pilot_power[m]` hold N_m + 1 entries where entry 0 is the cluster's
/// eavesdropper (its path loss and its pilot attack power) and entries
/// 1..N_m are the users. `tx_power[m]` holds N_m entries for users 1..N_m,
/// so user n's downlink power lives at `tx_power[m][n - 1]`; use `tx()`.
/// Cluster indices are zero-based.
struct SystemConfig {
    std::size_t n_antennas = 0;
    std::size_t n_clusters = 0;
    std::vector<std::size_t> cluster_sizes;
    std::size_t pilot_length = 0;
    Table path_loss;
    Table pilot_power;
    Table tx_power;
    /// Fraction of a weaker user's power left over after imperfect SIC.
    double sic_residual_coeff = 0.0;
    /// Assert P_{m,n} <= P_{m,n+1} inside every cluster during validation.
    bool enforce_power_order = false;

    std::size_t cluster_size(std::size_t m) const { return cluster_sizes.at(m); }

    std::size_t total_users() const {
        std::size_t k = 0;
        for (auto s : cluster_sizes) k += s;
        return k;
    }

    double alpha(std::size_t m, std::size_t n) const { return path_loss[m][n]; }
    double beta(std::size_t m) const { return path_loss[m][0]; }
    double pilot(std::size_t m, std::size_t n) const { return pilot_power[m][n]; }
    double attack_power(std::size_t m) const { return pilot_power[m][0]; }
    double tx(std::size_t m, std::size_t n) const { return tx_power[m][n - 1]; }

    double cluster_tx_power(std::size_t m) const {
        double s = 0.0;
        for (double p : tx_power[m]) s += p;
        return s;
    }

    double total_tx_power() const {
        double s = 0.0;
        for (std::size_t m = 0; m < n_clusters; ++m) s += cluster_tx_power(m);
        return s;
    }

    /// Downlink power of every cluster except `m`.
    double other_cluster_power(std::size_t m) const {
        double s = 0.0;
        for (std::size_t j = 0; j < n_clusters; ++j)
            if (j != m) s += cluster_tx_power(j);
        return s;
    }
};

struct ValidationReport {
    bool ok = true;
    std::string message;

    explicit operator bool() const { return ok; }

    static ValidationReport pass() { return {}; }
    static ValidationReport fail(std::string why) { return {false, std::move(why)}; }
};

namespace detail {

inline bool all_finite_nonnegative(const std::vector<double>& v, bool& negative) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
        if (x < 0.0) {
            negative = true;
            return false;
        }
    }
    return true;
}

}  // namespace detail

/// Checks every structural and physical invariant of a scenario and reports
/// the first violation by name.
inline ValidationReport validate(const SystemConfig& c) {
    if (c.n_antennas == 0) return ValidationReport::fail("n_antennas must be positive");
    if (c.n_clusters == 0) return ValidationReport::fail("n_clusters must be positive");
    if (c.pilot_length == 0) return ValidationReport::fail("pilot_length must be positive");
    if (c.cluster_sizes.size() != c.n_clusters)
        return ValidationReport::fail("cluster_sizes length != n_clusters");
    if (c.path_loss.size() != c.n_clusters || c.pilot_power.size() != c.n_clusters ||
        c.tx_power.size() != c.n_clusters)
        return ValidationReport::fail("per-cluster table count != n_clusters");

    for (std::size_t m = 0; m < c.n_clusters; ++m) {
        const std::size_t nm = c.cluster_sizes[m];
        const std::string where = " in cluster " + std::to_string(m + 1);
        if (nm == 0) return ValidationReport::fail("empty cluster" + where);
        if (c.path_loss[m].size() != nm + 1)
            return ValidationReport::fail("path_loss length != cluster size + 1" + where);
        if (c.pilot_power[m].size() != nm + 1)
            return ValidationReport::fail("pilot_power length != cluster size + 1" + where);
        if (c.tx_power[m].size() != nm)
            return ValidationReport::fail("tx_power length != cluster size" + where);

        bool negative = false;
        if (!detail::all_finite_nonnegative(c.path_loss[m], negative))
            return ValidationReport::fail((negative ? "negative path loss" : "non-finite path loss") +
                                          where);
        if (!detail::all_finite_nonnegative(c.pilot_power[m], negative) ||
            !detail::all_finite_nonnegative(c.tx_power[m], negative))
            return ValidationReport::fail((negative ? "negative power" : "non-finite power") + where);
    }

    if (c.pilot_length < c.n_clusters) return ValidationReport::fail("pilot_length < n_clusters");

    if (!(c.sic_residual_coeff >= 0.0 && c.sic_residual_coeff <= 1.0))
        return ValidationReport::fail("sic_residual_coeff outside [0, 1]");

    if (c.enforce_power_order) {
        for (std::size_t m = 0; m < c.n_clusters; ++m)
            for (std::size_t i = 1; i < c.tx_power[m].size(); ++i)
                if (c.tx_power[m][i - 1] > c.tx_power[m][i])
                    return ValidationReport::fail("tx_power not nondecreasing in cluster " +
                                                  std::to_string(m + 1));
    }
    return ValidationReport::pass();
}

// ---------------------------------------------------------------------------
// Randomness contract

/// Identifies one independent random substream.
struct SeedSpec {
    std::uint64_t master_seed = 0;
    std::uint64_t trial_index = 0;
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Pure function of (master_seed, trial_index); trials never share state.
inline constexpr std::uint64_t substream_seed(SeedSpec s) {
    return splitmix64(splitmix64(s.master_seed) ^ splitmix64(~s.trial_index));
}

/// Circularly-symmetric CN(0, 1) sample stream bound to one substream.
class GaussianSource {
  public:
    explicit GaussianSource(SeedSpec seed) : engine_(substream_seed(seed)) {}

    Complex next() {
        const double re = dist_(engine_);
        const double im = dist_(engine_);
        return {re, im};
    }

    CVector draw(std::size_t dim) {
        CVector v(dim);
        for (auto& z : v) z = next();
        return v;
    }

  private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> dist_{0.0, std::sqrt(0.5)};
};

/// One CN(0, I_dim) vector from a fresh substream.
inline CVector draw_gaussian_vector(SeedSpec seed, std::size_t dim) {
    return GaussianSource(seed).draw(dim);
}

// ---------------------------------------------------------------------------
// dB helpers (CLI boundary only)

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

}  // namespace noma
