// SPDX-License-Identifier: Apache-2.0
//
// noma-lab: secure massive NOMA downlink simulator and power optimizer
// ------------------------------------------------------------------------

#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "noma_lab/system_model.hpp"

namespace noma {

/// Second-order statistics of the shared-pilot cluster estimate.
struct EstimationModel {
    /// rho[m][n], n = 0 is the eavesdropper.
    Table rho;
    /// S_m = sum_{i=0}^{N_m} alpha_{m,i} Q_{m,i} tau.
    std::vector<double> cluster_pilot_energy;
    /// sqrt(S_m) / (1 + S_m), the MMSE scaling of the despread observation.
    std::vector<double> mmse_gain;

    double eve_rho(std::size_t m) const { return rho[m][0]; }
};

inline EstimationModel compute_rho(const SystemConfig& c) {
    EstimationModel model;
    model.rho.resize(c.n_clusters);
    model.cluster_pilot_energy.resize(c.n_clusters);
    model.mmse_gain.resize(c.n_clusters);
    const double tau = static_cast<double>(c.pilot_length);

    for (std::size_t m = 0; m < c.n_clusters; ++m) {
        const std::size_t nm = c.cluster_size(m);
        double s = 0.0;
        for (std::size_t i = 0; i <= nm; ++i) s += c.alpha(m, i) * c.pilot(m, i) * tau;
        model.cluster_pilot_energy[m] = s;
        model.mmse_gain[m] = std::sqrt(s) / (1.0 + s);
        model.rho[m].resize(nm + 1);
        for (std::size_t n = 0; n <= nm; ++n)
            model.rho[m][n] = c.alpha(m, n) * c.pilot(m, n) * tau / (1.0 + s);
    }
    return model;
}

/// One draw of every small-scale channel plus the per-cluster estimates.
struct ChannelRealization {
    /// true_channels[m][n], n = 0 is g_m.
    std::vector<std::vector<CVector>> true_channels;
    std::vector<CVector> despread_obs;
    std::vector<CVector> estimate;
    /// Unit per-element variance version of `estimate`; beams use this.
    std::vector<CVector> normalized_estimate;
};

/// Despreads the cluster pilots analytically and forms the MMSE estimate.
///
/// Draw order inside the substream is fixed: for every cluster, the N_m + 1
/// channel vectors (eavesdropper first), then the despread pilot noise, then
/// (only when S_m = 0) an isotropic fallback direction.
inline ChannelRealization simulate_estimation(const SystemConfig& c, const EstimationModel& model,
                                              SeedSpec seed) {
    GaussianSource rng(seed);
    const std::size_t nt = c.n_antennas;
    const double tau = static_cast<double>(c.pilot_length);

    ChannelRealization r;
    r.true_channels.resize(c.n_clusters);
    r.despread_obs.resize(c.n_clusters);
    r.estimate.resize(c.n_clusters);
    r.normalized_estimate.resize(c.n_clusters);

    for (std::size_t m = 0; m < c.n_clusters; ++m) {
        const std::size_t nm = c.cluster_size(m);
        auto& channels = r.true_channels[m];
        channels.reserve(nm + 1);
        for (std::size_t n = 0; n <= nm; ++n) channels.push_back(rng.draw(nt));

        CVector obs = rng.draw(nt);
        for (std::size_t n = 0; n <= nm; ++n) {
            const double amp = std::sqrt(c.alpha(m, n) * c.pilot(m, n) * tau);
            if (amp == 0.0) continue;
            for (std::size_t k = 0; k < nt; ++k) obs[k] += amp * channels[n][k];
        }

        const double s = model.cluster_pilot_energy[m];
        CVector est(nt), normalized(nt);
        if (s > 0.0) {
            const double gain = model.mmse_gain[m];
            const double unit = 1.0 / std::sqrt(1.0 + s);
            for (std::size_t k = 0; k < nt; ++k) {
                est[k] = gain * obs[k];
                normalized[k] = unit * obs[k];
            }
        } else {
            normalized = rng.draw(nt);
        }
        r.despread_obs[m] = std::move(obs);
        r.estimate[m] = std::move(est);
        r.normalized_estimate[m] = std::move(normalized);
    }
    return r;
}

inline ChannelRealization simulate_estimation(const SystemConfig& c, SeedSpec seed) {
    return simulate_estimation(c, compute_rho(c), seed);
}

/// h_{m,n} = sqrt(rho) * normalized_estimate + sqrt(1 - rho) * e_{m,n}.
struct ChannelDecomposition {
    double estimate_coeff = 0.0;
    double error_coeff = 1.0;
    /// Empirical e_{m,n}; empty when rho = 1 leaves it undefined.
    std::optional<CVector> residual;
};

inline ChannelDecomposition decompose_channel(const ChannelRealization& r, const EstimationModel& model,
                                              std::size_t m, std::size_t n) {
    if (n >= model.rho.at(m).size()) throw std::out_of_range("decompose_channel: user index");
    const double rho = model.rho[m][n];
    ChannelDecomposition d;
    d.estimate_coeff = std::sqrt(rho);
    d.error_coeff = std::sqrt(1.0 - rho);
    if (rho >= 1.0) return d;

    const auto& h = r.true_channels[m][n];
    const auto& est = r.normalized_estimate[m];
    CVector e(h.size());
    for (std::size_t k = 0; k < h.size(); ++k)
        e[k] = (h[k] - d.estimate_coeff * est[k]) / d.error_coeff;
    d.residual = std::move(e);
    return d;
}

}  // namespace noma
