// SPDX-License-Identifier: Apache-2.0
//
// noma-lab: secure massive NOMA downlink simulator and power optimizer
// ------------------------------------------------------------------------

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "noma_lab/airlink.hpp"
#include "noma_lab/monte_carlo.hpp"
#include "noma_lab/rate_analysis.hpp"
#include "test_support.hpp"

using namespace noma;
using noma::testing::tiny_config;

namespace {

/// Realization with hand-set channels for a single cluster on N_t = 1.
ChannelRealization scalar_realization(std::vector<Complex> channels, Complex estimate) {
    ChannelRealization r;
    r.true_channels.resize(1);
    for (const auto& h : channels) r.true_channels[0].push_back(CVector{h});
    r.despread_obs = {CVector{estimate}};
    r.estimate = {CVector{estimate}};
    r.normalized_estimate = {CVector{estimate}};
    return r;
}

}  // namespace

TEST(Beams, ScalingIdentity) {
    std::vector<CVector> dirs{CVector{{2.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}}};
    const auto b = make_beams(std::span<const CVector>(dirs));
    EXPECT_EQ(b.beams[0][0], Complex(1.0, 0.0));
    EXPECT_EQ(b.beams[0][1], Complex(0.0, 0.0));
}

TEST(Beams, UnitNormOverDraws) {
    const auto c = default_scenario();
    for (std::size_t t = 0; t < 1000; ++t) {
        const auto r = simulate_estimation(c, {21, t});
        const auto b = make_beams(r);
        for (const auto& w : b.beams) EXPECT_NEAR(squared_norm(w), 1.0, 1e-12);
    }
}

TEST(Beams, EstimateAndNormalizedEstimateAgree) {
    const auto c = default_scenario();
    const auto r = simulate_estimation(c, {22, 0});
    const auto a = make_beams(std::span<const CVector>(r.estimate));
    const auto b = make_beams(r);
    for (std::size_t m = 0; m < c.n_clusters; ++m)
        for (std::size_t k = 0; k < c.n_antennas; ++k) EXPECT_NEAR(std::abs(a.beams[m][k] - b.beams[m][k]), 0.0, 1e-12);
}

TEST(Beams, ZeroVectorThrows) {
    std::vector<CVector> dirs{CVector(4)};
    EXPECT_THROW(make_beams(std::span<const CVector>(dirs)), std::invalid_argument);
}

TEST(SicOrder, SortsDescending) {
    const std::vector<double> g{4.0, 1.0, 9.0};
    EXPECT_EQ(sic_order(std::span<const double>(g)), (std::vector<std::size_t>{3, 1, 2}));
}

TEST(SicOrder, TiesKeepLowerIndexFirst) {
    const std::vector<double> g{1.0, 1.0};
    EXPECT_EQ(sic_order(std::span<const double>(g)), (std::vector<std::size_t>{1, 2}));
}

TEST(SicOrder, FirstPositionHasMaximalGain) {
    const auto c = default_scenario();
    for (std::size_t t = 0; t < 100; ++t) {
        const auto r = simulate_estimation(c, {23, t});
        const auto rec = instantaneous_sinr(c, r, make_beams(r));
        const auto order = sic_order(rec, 0);
        const auto& g = rec.effective_gain[0];
        EXPECT_EQ(g[order[0] - 1], *std::max_element(g.begin(), g.end()));
    }
}

TEST(Sinr, SingleUserNoInterference) {
    // |h^H w|^2 = 1, alpha = 1, P = 2.
    const auto c = tiny_config(1, 1, {{0.0, 1.0}}, {{0.0, 1.0}}, {{2.0}});
    const auto r = scalar_realization({{0.0, 0.0}, {1.0, 0.0}}, {1.0, 0.0});
    const auto rec = instantaneous_sinr(c, r, make_beams(r));
    EXPECT_DOUBLE_EQ(rec.legit_sinr[0][0], 2.0);
}

TEST(Sinr, TwoEqualPowerUsersByHand) {
    // N_t = 1, w = 1. User 1: h = 2, alpha 1 -> gain 4. User 2: h = 1,
    // alpha 0.5 -> gain 0.5. Both P = 1, eps = 0.2. Eve: g = 1, beta = 0.25.
    auto c = tiny_config(1, 1, {{0.25, 1.0, 0.5}}, {{1.0, 1.0, 1.0}}, {{1.0, 1.0}});
    c.sic_residual_coeff = 0.2;
    const auto r = scalar_realization({{1.0, 0.0}, {2.0, 0.0}, {1.0, 0.0}}, {1.0, 0.0});
    const auto rec = instantaneous_sinr(c, r, make_beams(r));
    // User 1 decodes first in SIC order, so its residual is eps * P_2.
    EXPECT_NEAR(rec.legit_sinr[0][0], 4.0 / (4.0 * 0.2 + 1.0), 1e-14);
    // User 2 suffers the stronger user's full power.
    EXPECT_NEAR(rec.legit_sinr[0][1], 0.5 / (0.5 + 1.0), 1e-14);
    EXPECT_NEAR(rec.eve_sinr[0][0], 0.25 / (0.25 + 1.0), 1e-14);
    EXPECT_NEAR(rec.eve_sinr[0][1], 0.25 / (0.25 + 1.0), 1e-14);
}

TEST(Sinr, OrderFollowsRealizedGainNotIndex) {
    // User 2 has the larger realized gain, so user 1 sees it as stronger.
    auto c = tiny_config(1, 1, {{0.0, 1.0, 1.0}}, {{0.0, 1.0, 1.0}}, {{1.0, 3.0}});
    const auto r = scalar_realization({{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}}, {1.0, 0.0});
    const auto rec = instantaneous_sinr(c, r, make_beams(r));
    EXPECT_EQ(sic_order(rec, 0), (std::vector<std::size_t>{2, 1}));
    EXPECT_NEAR(rec.legit_sinr[0][1], 12.0, 1e-14);
    EXPECT_NEAR(rec.legit_sinr[0][0], 1.0 / (3.0 + 1.0), 1e-14);
}

TEST(Sinr, ScaleInvariance) {
    const auto c = default_scenario();
    auto r = simulate_estimation(c, {24, 0});
    const auto base = instantaneous_sinr(c, r, make_beams(r));
    for (auto& v : r.normalized_estimate)
        for (auto& z : v) z *= 7.5;
    const auto scaled = instantaneous_sinr(c, r, make_beams(r));
    for (std::size_t m = 0; m < c.n_clusters; ++m)
        for (std::size_t n = 0; n < c.cluster_size(m); ++n) {
            EXPECT_NEAR(scaled.legit_sinr[m][n], base.legit_sinr[m][n], 1e-12 * (1.0 + base.legit_sinr[m][n]));
            EXPECT_NEAR(scaled.eve_sinr[m][n], base.eve_sinr[m][n], 1e-12 * (1.0 + base.eve_sinr[m][n]));
        }
}

TEST(Sinr, FullResidualMatchesEveStructure) {
    // With eps = 1 and a user whose channel equals Eve's with equal path
    // loss, both SINRs coincide.
    auto c = tiny_config(1, 1, {{0.5, 1.0, 0.5}}, {{1.0, 1.0, 1.0}}, {{1.0, 2.0}});
    c.sic_residual_coeff = 1.0;
    const auto r = scalar_realization({{1.5, 0.0}, {2.0, 0.0}, {1.5, 0.0}}, {1.0, 0.0});
    const auto rec = instantaneous_sinr(c, r, make_beams(r));
    EXPECT_NEAR(rec.legit_sinr[0][1], rec.eve_sinr[0][1], 1e-14);
}

TEST(Sinr, NonincreasingInStrongerPower) {
    const auto c = default_scenario();
    const auto r = simulate_estimation(c, {25, 0});
    const auto beams = make_beams(r);
    const auto base = instantaneous_sinr(c, r, beams);
    const auto order = sic_order(base, 0);
    const std::size_t first = order[0], second = order[1];
    auto bumped = c;
    bumped.tx_power[0][first - 1] *= 1.5;
    const auto rec = instantaneous_sinr(bumped, r, beams);
    ASSERT_EQ(sic_order(rec, 0), order);
    EXPECT_LT(rec.legit_sinr[0][second - 1], base.legit_sinr[0][second - 1]);
}

TEST(Sinr, EveInvariantToOrder) {
    // Swapping user path losses changes the SIC order but not Eve's SINR.
    const auto c = default_scenario();
    const auto r = simulate_estimation(c, {26, 0});
    const auto beams = make_beams(r);
    auto swapped = c;
    std::swap(swapped.path_loss[0][1], swapped.path_loss[0][4]);
    const auto a = instantaneous_sinr(c, r, beams);
    const auto b = instantaneous_sinr(swapped, r, beams);
    EXPECT_EQ(a.eve_sinr[0], b.eve_sinr[0]);
}

TEST(Sinr, PassiveEveMatchesScalarOracle) {
    // U = 0 leaves Eve's channel independent of the beam, so |g^H w|^2 is
    // Exp(1). One cluster keeps the oracle exact.
    auto c = default_scenario();
    c.n_clusters = 1;
    c.cluster_sizes.resize(1);
    c.path_loss.resize(1);
    c.pilot_power.resize(1);
    c.tx_power.resize(1);
    c.pilot_power[0][0] = 0.0;
    const auto mc = estimate_rates(c, 10000, 31, {});
    const auto oracle = noma::testing::passive_eve_rate(c, 0, 2, 200000, 5);
    const double tol = 3.0 * std::hypot(mc.eve.std_error[0][1], oracle.second);
    EXPECT_NEAR(mc.eve.mean[0][1], oracle.first, tol);
    // The closed form is exactly zero in this regime.
    EXPECT_EQ(eve_rate_closed_form(c, compute_rho(c), 0, 2), 0.0);
}
