// SPDX-License-Identifier: Apache-2.0
//
// noma-lab: secure massive NOMA downlink simulator and power optimizer
// ------------------------------------------------------------------------

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "noma_lab/channel_estimation.hpp"
#include "noma_lab/system_model.hpp"

namespace noma {

/// One unit-norm MRT beam per cluster.
struct BeamSet {
    std::vector<CVector> beams;
};

inline double squared_norm(std::span<const Complex> v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return s;
}

/// h^H w.
inline Complex inner(std::span<const Complex> h, std::span<const Complex> w) {
    Complex s{0.0, 0.0};
    for (std::size_t k = 0; k < h.size(); ++k) s += std::conj(h[k]) * w[k];
    return s;
}

inline CVector unit_direction(std::span<const Complex> v) {
    const double norm = std::sqrt(squared_norm(v));
    if (norm == 0.0) throw std::invalid_argument("unit_direction: zero vector");
    CVector w(v.begin(), v.end());
    for (auto& z : w) z /= norm;
    return w;
}

inline BeamSet make_beams(std::span<const CVector> directions) {
    BeamSet set;
    set.beams.reserve(directions.size());
    for (const auto& d : directions) set.beams.push_back(unit_direction(d));
    return set;
}

/// MRT from the normalized estimate. A zero literal estimate (no pilot energy)
/// falls back to the isotropic direction stored in the normalized estimate.
inline BeamSet make_beams(const ChannelRealization& r) {
    return make_beams(std::span<const CVector>(r.normalized_estimate));
}

/// Instantaneous SINRs of one realization. Per-user vectors are indexed by
/// n - 1 for user n.
struct SinrRecord {
    Table legit_sinr;
    Table eve_sinr;
    /// alpha_{m,n} |h_{m,n}^H w_m|^2, the SIC ordering key.
    Table effective_gain;
};

/// Positions 1..N sorted by descending gain; ties keep the lower index first.
inline std::vector<std::size_t> sic_order(std::span<const double> gains) {
    std::vector<std::size_t> order(gains.size());
    std::iota(order.begin(), order.end(), std::size_t{1});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return gains[a - 1] > gains[b - 1]; });
    return order;
}

inline std::vector<std::size_t> sic_order(const SinrRecord& record, std::size_t m) {
    return sic_order(std::span<const double>(record.effective_gain.at(m)));
}

/// Evaluates the post-SIC user SINRs and the no-SIC eavesdropper SINRs.
///
/// Users cancel every signal decoded after them in the SIC order; a
/// fraction `sic_residual_coeff` of those weaker signals stays behind.
/// Eavesdroppers see every other intra-cluster signal as interference.
inline SinrRecord instantaneous_sinr(const SystemConfig& c, const ChannelRealization& r,
                                     const BeamSet& beams) {
    const std::size_t nc = c.n_clusters;
    const double eps = c.sic_residual_coeff;
    std::vector<double> cluster_power(nc);
    for (std::size_t j = 0; j < nc; ++j) cluster_power[j] = c.cluster_tx_power(j);

    SinrRecord rec;
    rec.legit_sinr.resize(nc);
    rec.eve_sinr.resize(nc);
    rec.effective_gain.resize(nc);

    std::vector<double> cross(nc);
    auto cross_gains = [&](const CVector& h) {
        for (std::size_t j = 0; j < nc; ++j) cross[j] = std::norm(inner(h, beams.beams[j]));
    };
    auto inter_cluster = [&](std::size_t m) {
        double s = 0.0;
        for (std::size_t j = 0; j < nc; ++j)
            if (j != m) s += cross[j] * cluster_power[j];
        return s;
    };

    for (std::size_t m = 0; m < nc; ++m) {
        const std::size_t nm = c.cluster_size(m);
        std::vector<double> own_gain(nm), inter(nm);
        auto& eff = rec.effective_gain[m];
        eff.resize(nm);
        for (std::size_t n = 1; n <= nm; ++n) {
            cross_gains(r.true_channels[m][n]);
            own_gain[n - 1] = cross[m];
            inter[n - 1] = inter_cluster(m);
            eff[n - 1] = c.alpha(m, n) * cross[m];
        }

        const auto order = sic_order(std::span<const double>(eff));
        std::vector<std::size_t> position(nm + 1);
        for (std::size_t p = 0; p < nm; ++p) position[order[p]] = p;

        auto& legit = rec.legit_sinr[m];
        legit.resize(nm);
        for (std::size_t n = 1; n <= nm; ++n) {
            double intra = 0.0;
            for (std::size_t i = 1; i <= nm; ++i) {
                if (i == n) continue;
                intra += (position[i] < position[n] ? 1.0 : eps) * c.tx(m, i);
            }
            const double a = c.alpha(m, n);
            const double g = own_gain[n - 1];
            const double denom = g * a * intra + a * inter[n - 1] + kNoisePower;
            legit[n - 1] = g * a * c.tx(m, n) / denom;
        }

        cross_gains(r.true_channels[m][0]);
        const double b = c.beta(m);
        const double ge = cross[m];
        const double eve_inter = inter_cluster(m);
        auto& eve = rec.eve_sinr[m];
        eve.resize(nm);
        for (std::size_t n = 1; n <= nm; ++n) {
            const double p = c.tx(m, n);
            double others = 0.0;
            for (std::size_t i = 1; i <= nm; ++i)
                if (i != n) others += c.tx(m, i);
            const double denom = ge * b * others + b * eve_inter + kNoisePower;
            eve[n - 1] = ge * b * p / denom;
        }
    }
    return rec;
}

}  // namespace noma
