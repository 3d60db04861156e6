// SPDX-License-Identifier: Apache-2.0
//
// noma-lab: secure massive NOMA downlink simulator and power optimizer
// ------------------------------------------------------------------------

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "noma_lab/scenario_io.hpp"
#include "test_support.hpp"

using namespace noma;

namespace {

SystemConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_scenario(in);
}

std::string error_of(const std::string& text) {
    try {
        parse(text);
    } catch (const ScenarioError& e) {
        return e.what();
    }
    return {};
}

void expect_same(const SystemConfig& a, const SystemConfig& b) {
    EXPECT_EQ(a.n_antennas, b.n_antennas);
    EXPECT_EQ(a.n_clusters, b.n_clusters);
    EXPECT_EQ(a.cluster_sizes, b.cluster_sizes);
    EXPECT_EQ(a.pilot_length, b.pilot_length);
    EXPECT_EQ(a.path_loss, b.path_loss);
    EXPECT_EQ(a.pilot_power, b.pilot_power);
    EXPECT_EQ(a.tx_power, b.tx_power);
    EXPECT_EQ(a.sic_residual_coeff, b.sic_residual_coeff);
    EXPECT_EQ(a.enforce_power_order, b.enforce_power_order);
}

const char* kMinimal = R"(# two users
schema_version = 1
n_antennas = 8
pilot_length = 2
sic_residual_coeff = 0.25

[cluster]
size = 2
path_loss = 0.5 1 0.2     # Eve first
pilot_power = 1 2 3
tx_power = 1 4
)";

}  // namespace

TEST(ScenarioIo, ParsesMinimalFile) {
    const auto c = parse(kMinimal);
    EXPECT_EQ(c.n_antennas, 8u);
    EXPECT_EQ(c.n_clusters, 1u);
    EXPECT_EQ(c.pilot_length, 2u);
    EXPECT_EQ(c.sic_residual_coeff, 0.25);
    EXPECT_EQ(c.path_loss[0], (std::vector<double>{0.5, 1.0, 0.2}));
    EXPECT_EQ(c.tx_power[0], (std::vector<double>{1.0, 4.0}));
    EXPECT_TRUE(validate(c).ok);
}

TEST(ScenarioIo, RoundTripIsExact) {
    std::mt19937_64 g(5);
    for (int k = 0; k < 20; ++k) {
        auto c = noma::testing::random_config(g);
        c.sic_residual_coeff = 0.1 * k / 3.0;
        c.enforce_power_order = k % 2;
        expect_same(parse(write_scenario(c)), c);
    }
    expect_same(parse(write_scenario(default_scenario())), default_scenario());
}

TEST(ScenarioIo, ErrorsCarryLineNumbers) {
    EXPECT_EQ(error_of("schema_version = 1\nn_antennas = 4x\n"), "scenario line 2: not a number: '4x'");
    EXPECT_EQ(error_of("schema_version = 2\n"), "scenario line 1: unsupported schema_version 2");
    EXPECT_EQ(error_of("schema_version = 1\n\nbogus\n"), "scenario line 3: expected 'key = value'");
    EXPECT_EQ(error_of("color = red\n"), "scenario line 1: unknown key 'color'");
    EXPECT_EQ(error_of("[cluster]\nweight = 3\n"), "scenario line 2: unknown cluster key 'weight'");
    EXPECT_EQ(error_of("n_antennas = 2.5\n"), "scenario line 1: expected a nonnegative integer: '2.5'");
    EXPECT_EQ(error_of("enforce_power_order = yes\n"),
              "scenario line 1: enforce_power_order must be true or false");
}

TEST(ScenarioIo, MissingKeysAndCountMismatch) {
    EXPECT_EQ(error_of("n_antennas = 4\npilot_length = 1\n"), "scenario: missing schema_version");
    EXPECT_EQ(error_of("schema_version = 1\npilot_length = 1\n"), "scenario: missing n_antennas");
    std::string two = kMinimal;
    two.insert(two.find("[cluster]"), "n_clusters = 2\n");
    EXPECT_EQ(error_of(two), "scenario: n_clusters = 2 but 1 [cluster] blocks");
    EXPECT_EQ(error_of("schema_version = 1\nn_antennas = 4\npilot_length = 1\n[cluster]\npath_loss = 1 1\n"),
              "scenario: cluster 1 missing size");
}

TEST(ScenarioIo, MissingFileThrows) {
    EXPECT_THROW(load_scenario("/nonexistent/noma.scn"), ScenarioError);
}

TEST(ScenarioIo, ShippedDefaultMatchesBuiltIn) {
    const auto c = load_scenario(std::string(NOMA_LAB_SOURCE_DIR) + "/scenarios/default.scn");
    expect_same(c, default_scenario());
}

TEST(ScenarioIo, MakeScenarioLayout) {
    ScenarioParams p;
    p.n_clusters = 2;
    p.cluster_size = 3;
    p.psnr_db = 10.0;
    const auto c = make_scenario(p);
    EXPECT_TRUE(validate(c).ok);
    EXPECT_EQ(c.total_users(), 6u);
    EXPECT_NEAR(c.total_tx_power(), 10.0, 1e-12);
    EXPECT_EQ(c.path_loss[0][1], 1.0);
    EXPECT_NEAR(c.path_loss[0][3], 0.1, 1e-15);
    EXPECT_EQ(c.path_loss[0][0], 0.5);
    EXPECT_NEAR(c.tx_power[1][2] / c.tx_power[1][0], 3.0, 1e-12);
}
