// SPDX-License-Identifier: Apache-2.0
//
// noma-lab: secure massive NOMA downlink simulator and power optimizer
// ------------------------------------------------------------------------

#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "noma_lab/channel_estimation.hpp"
#include "noma_lab/scenario_io.hpp"
#include "test_support.hpp"

using namespace noma;
using noma::testing::tiny_config;

TEST(Rho, SingleUserHalf) {
    const auto c = tiny_config(4, 1, {{0.0, 1.0}}, {{0.0, 1.0}}, {{1.0}});
    const auto m = compute_rho(c);
    EXPECT_DOUBLE_EQ(m.rho[0][1], 0.5);
    EXPECT_EQ(m.rho[0][0], 0.0);
    EXPECT_DOUBLE_EQ(m.cluster_pilot_energy[0], 1.0);
    EXPECT_DOUBLE_EQ(m.mmse_gain[0], 0.5);
}

TEST(Rho, ZeroPilotsGiveZero) {
    const auto c = tiny_config(4, 2, {{0.5, 1.0, 0.3}}, {{0.0, 0.0, 0.0}}, {{1.0, 1.0}});
    const auto m = compute_rho(c);
    for (double r : m.rho[0]) EXPECT_EQ(r, 0.0);
}

TEST(Rho, TwoUsersWithAttacker) {
    const auto c = tiny_config(4, 2, {{1.0, 1.0, 1.0}}, {{1.0, 1.0, 1.0}}, {{1.0, 1.0}});
    const auto m = compute_rho(c);
    EXPECT_DOUBLE_EQ(m.cluster_pilot_energy[0], 6.0);
    for (double r : m.rho[0]) EXPECT_NEAR(r, 2.0 / 7.0, 1e-15);
    EXPECT_NEAR(m.rho[0][0] + m.rho[0][1] + m.rho[0][2], 6.0 / 7.0, 1e-15);
}

TEST(Rho, SumIdentityOnDefault) {
    const auto c = default_scenario();
    const auto m = compute_rho(c);
    for (std::size_t k = 0; k < c.n_clusters; ++k) {
        double sum = 0.0;
        for (double r : m.rho[k]) {
            EXPECT_GE(r, 0.0);
            EXPECT_LE(r, 1.0);
            sum += r;
        }
        const double s = m.cluster_pilot_energy[k];
        EXPECT_NEAR(sum, s / (1.0 + s), 1e-12 * s / (1.0 + s));
    }
}

TEST(Rho, MonotoneInOwnAndOtherPilots) {
    auto c = default_scenario();
    const auto base = compute_rho(c);
    for (std::size_t n = 0; n <= 4; ++n) {
        auto bumped = c;
        bumped.pilot_power[0][n] *= 1.1;
        const auto r = compute_rho(bumped);
        for (std::size_t i = 0; i <= 4; ++i) {
            if (i == n)
                EXPECT_GT(r.rho[0][i], base.rho[0][i]);
            else
                EXPECT_LT(r.rho[0][i], base.rho[0][i]);
        }
        EXPECT_EQ(r.rho[1], base.rho[1]);
    }
}

TEST(Rho, EveZeroIffPassiveOrNoPathLoss) {
    auto c = default_scenario();
    EXPECT_GT(compute_rho(c).eve_rho(0), 0.0);
    c.pilot_power[0][0] = 0.0;
    EXPECT_EQ(compute_rho(c).eve_rho(0), 0.0);
    c = default_scenario();
    c.path_loss[0][0] = 0.0;
    EXPECT_EQ(compute_rho(c).eve_rho(0), 0.0);
}

TEST(Estimation, ZeroPilotsGiveZeroEstimate) {
    const auto c = tiny_config(8, 1, {{0.5, 1.0}}, {{0.0, 0.0}}, {{1.0}});
    const auto r = simulate_estimation(c, {1, 0});
    for (const auto& z : r.estimate[0]) EXPECT_EQ(z, Complex(0.0, 0.0));
    double norm = 0.0;
    for (const auto& z : r.normalized_estimate[0]) norm += std::norm(z);
    EXPECT_GT(norm, 0.0);
}

TEST(Estimation, ObservationStructure) {
    const auto c = default_scenario();
    const auto model = compute_rho(c);
    const auto r = simulate_estimation(c, model, {11, 3});
    // Literal estimate equals the MMSE gain times the despread observation,
    // and the normalized one rescales it to unit element variance.
    for (std::size_t m = 0; m < c.n_clusters; ++m) {
        const double s = model.cluster_pilot_energy[m];
        for (std::size_t k = 0; k < c.n_antennas; ++k) {
            EXPECT_NEAR(std::abs(r.estimate[m][k] - model.mmse_gain[m] * r.despread_obs[m][k]), 0.0, 1e-12);
            EXPECT_NEAR(std::abs(r.normalized_estimate[m][k] * std::sqrt(s / (1.0 + s)) - r.estimate[m][k]), 0.0,
                        1e-12);
        }
    }
}

TEST(Estimation, LargePilotEnergyRecoversChannel) {
    const auto c = tiny_config(4, 1, {{0.0, 1.0}}, {{0.0, 1e6}}, {{1.0}});
    const auto model = compute_rho(c);
    double corr = 0.0;
    constexpr std::size_t trials = 10000;
    for (std::size_t t = 0; t < trials; ++t) {
        const auto r = simulate_estimation(c, model, {2, t});
        for (std::size_t k = 0; k < 4; ++k)
            corr += std::real(r.true_channels[0][1][k] * std::conj(r.normalized_estimate[0][k]));
    }
    corr /= trials * 4.0;
    EXPECT_NEAR(corr, 1.0, 0.01);
    EXPECT_NEAR(std::sqrt(model.rho[0][1]), 1.0, 1e-6);
}

TEST(Estimation, EstimateVarianceMatchesPilotEnergy) {
    const auto c = default_scenario();
    const auto model = compute_rho(c);
    constexpr std::size_t trials = 10000;
    // Element 0 of cluster 0's estimate; E|x|^2 = S / (1 + S).
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        const auto r = simulate_estimation(c, model, {4, t});
        const double v = std::norm(r.estimate[0][0]);
        sum += v;
        sum2 += v * v;
    }
    const double mean = sum / trials;
    const double se = std::sqrt((sum2 / trials - mean * mean) / trials);
    const double s = model.cluster_pilot_energy[0];
    EXPECT_NEAR(mean, s / (1.0 + s), 5.0 * se);
}

TEST(Estimation, CorrelationWithEstimateIsSqrtRho) {
    const auto c = default_scenario();
    const auto model = compute_rho(c);
    constexpr std::size_t trials = 10000;
    for (std::size_t n = 0; n <= 4; ++n) {
        double sum = 0.0, sum2 = 0.0;
        for (std::size_t t = 0; t < trials; ++t) {
            const auto r = simulate_estimation(c, model, {6, t});
            const double v = std::real(r.true_channels[0][n][0] * std::conj(r.normalized_estimate[0][0]));
            sum += v;
            sum2 += v * v;
        }
        const double mean = sum / trials;
        const double se = std::sqrt((sum2 / trials - mean * mean) / trials);
        EXPECT_NEAR(mean, std::sqrt(model.rho[0][n]), 3.0 * se) << "n = " << n;
    }
}

TEST(Decompose, PassiveEveCoefficients) {
    auto c = default_scenario();
    c.pilot_power[0][0] = 0.0;
    const auto model = compute_rho(c);
    const auto r = simulate_estimation(c, model, {1, 1});
    const auto d = decompose_channel(r, model, 0, 0);
    EXPECT_EQ(d.estimate_coeff, 0.0);
    EXPECT_EQ(d.error_coeff, 1.0);
    ASSERT_TRUE(d.residual.has_value());
    for (std::size_t k = 0; k < c.n_antennas; ++k) EXPECT_EQ((*d.residual)[k], r.true_channels[0][0][k]);
}

TEST(Decompose, ResidualUnitVarianceAndUncorrelated) {
    // Single user with alpha Q tau = 1 gives rho = 0.5.
    const auto c = tiny_config(8, 1, {{0.0, 1.0}}, {{0.0, 1.0}}, {{1.0}});
    const auto model = compute_rho(c);
    ASSERT_DOUBLE_EQ(model.rho[0][1], 0.5);
    constexpr std::size_t trials = 10000;
    double p = 0.0, p2 = 0.0, x = 0.0, x2 = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        const auto r = simulate_estimation(c, model, {8, t});
        const auto d = decompose_channel(r, model, 0, 1);
        ASSERT_TRUE(d.residual.has_value());
        const double v = std::norm((*d.residual)[0]);
        p += v;
        p2 += v * v;
        const double w = std::real((*d.residual)[0] * std::conj(r.normalized_estimate[0][0]));
        x += w;
        x2 += w * w;
    }
    const double pm = p / trials, xm = x / trials;
    EXPECT_NEAR(pm, 1.0, 5.0 * std::sqrt((p2 / trials - pm * pm) / trials));
    EXPECT_NEAR(xm, 0.0, 3.0 * std::sqrt((x2 / trials - xm * xm) / trials));
}

TEST(Decompose, FullCorrelationHasNoResidual) {
    const auto c = tiny_config(4, 1, {{0.0, 1.0}}, {{0.0, 1.0}}, {{1.0}});
    EstimationModel model = compute_rho(c);
    model.rho[0][1] = 1.0;
    const auto r = simulate_estimation(c, model, {1, 0});
    const auto d = decompose_channel(r, model, 0, 1);
    EXPECT_EQ(d.estimate_coeff, 1.0);
    EXPECT_EQ(d.error_coeff, 0.0);
    EXPECT_FALSE(d.residual.has_value());
}

TEST(Estimation, Deterministic) {
    const auto c = default_scenario();
    const auto a = simulate_estimation(c, {77, 5});
    const auto b = simulate_estimation(c, {77, 5});
    for (std::size_t m = 0; m < c.n_clusters; ++m)
        for (std::size_t k = 0; k < c.n_antennas; ++k) EXPECT_EQ(a.estimate[m][k], b.estimate[m][k]);
}
