#include <gtest/gtest.h>

#include <cmath>

#include "uowc/mc_oracle.hpp"
#include "uowc/rx_power.hpp"

using namespace uowc;
using namespace uowc::mc;

TEST(McOracle, PreconditionsAreEnforced) {
  const SystemParams p = default_params();
  EXPECT_THROW(mc_nn_distance(1e-3, 50.0, 999, {}), DomainError);
  EXPECT_THROW(mc_expected_depth(1e-3, 50.0, 10, {}), DomainError);
  EXPECT_THROW(mc_power_angular(p, 20.0, 9999, {}), DomainError);
  EXPECT_THROW(mc_power_full(p, 20.0, 100, {}), DomainError);
  EXPECT_THROW(mc_power_angular(p, 20.0, 10000, {}, {0.5, 0.2}), DomainError);
}

TEST(McOracle, WindowRadius) {
  const double rw = window_radius(1e-3, 50.0);
  EXPECT_GE(rw, 50.0);
  EXPECT_LT(NNDistribution(1e-3, 50.0).survival(rw), 1.01e-9);
  EXPECT_DOUBLE_EQ(window_radius(100.0, 50.0), 50.0);
}

TEST(McOracle, SameSeedSameSamples) {
  const auto a = sample_nearest_neighbors(1e-3, 50.0, 1000, {42, 1});
  const auto b = sample_nearest_neighbors(1e-3, 50.0, 1000, {42, 1});
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    EXPECT_EQ(a.samples[i].distance, b.samples[i].distance);
    EXPECT_EQ(a.samples[i].height, b.samples[i].height);
  }
  const auto c = sample_nearest_neighbors(1e-3, 50.0, 1000, {43, 1});
  EXPECT_NE(a.samples.front().distance, c.samples.front().distance);
}

TEST(McOracle, WorkerCountDoesNotChangeResults) {
  const SystemParams p = default_params();
  const McConfig one{7, 1, 4096};
  const McConfig four{7, 4, 4096};
  const auto a = mc_power_angular(p, 20.0, 100000, one);
  const auto b = mc_power_angular(p, 20.0, 100000, four);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.std_error, b.std_error);
  const auto x = sample_nearest_neighbors(1e-3, 50.0, 20000, one);
  const auto y = sample_nearest_neighbors(1e-3, 50.0, 20000, four);
  ASSERT_EQ(x.samples.size(), y.samples.size());
  for (std::size_t i = 0; i < x.samples.size(); ++i) EXPECT_EQ(x.samples[i].distance, y.samples[i].distance);
}

TEST(McOracle, NearestNeighbourLaw) {
  const auto rep = mc_nn_distance(1e-3, 50.0, 100000, {42, 4});
  EXPECT_LT(rep.ks_statistic, 0.01);
  EXPECT_EQ(rep.set.empty_realizations, 0u);
  EXPECT_LT(std::abs(rep.mean_distance.z_score(NNDistribution(1e-3, 50.0).mean_distance())), 3.0);
}

TEST(McOracle, DenseLimitMean) {
  const auto rep = mc_nn_distance(1.0, 5.0, 20000, {5, 4});
  EXPECT_LT(std::abs(rep.mean_distance.z_score(NNDistribution(1.0, 5.0).mean_distance())), 3.0);
}

TEST(McOracle, ExpectedDepth) {
  const auto e = mc_expected_depth(1e-3, 50.0, 100000, {42, 4});
  EXPECT_LT(std::abs(e.z_score(12.848651984236851)), 3.0);
  const auto sparse = mc_expected_depth(1e-7, 50.0, 2000, {1, 4});
  EXPECT_NEAR(sparse.mean, 25.0, 4.0 * sparse.std_error + 0.5);
}

TEST(McOracle, AngularMatchesClosedForms) {
  const SystemParams p = default_params();
  const double phi = p->phi_half;
  const double d = optimal_offset_exact(phi);
  const McConfig cfg{42, 4};
  EXPECT_LT(std::abs(mc_power_angular(p, 20.0, 1000000, cfg).z_score(power_random_orientation(p, 20.0).value)), 3.0);
  EXPECT_LT(std::abs(mc_power_angular(p, 20.0, 1000000, cfg, {0.0, phi}).z_score(power_main_lobe(p, 20.0).value)),
            3.0);
  EXPECT_LT(std::abs(mc_power_angular(p, 20.0, 1000000, cfg, {d, d + phi}).z_score(power_offset(p, 20.0, d).value)),
            3.0);
}

TEST(McOracle, InnerExpectationForUnitOrder) {
  // for m = 1 the angular integral is 2 pi^2, so the estimate divided by C0' is 2 pi^2
  const SystemParams p = default_params();
  const auto e = mc_power_angular(p, 20.0, 1000000, {3, 4});
  const double c0 = angular_prefactor(p, 20.0);
  EXPECT_NEAR(e.mean / c0, 2.0 * pi * pi, 4.0 * e.std_error / c0);
}

TEST(McOracle, FullApertureFarAndNear) {
  const SystemParams p = default_params();
  const double r = p.aperture_radius();
  const McConfig cfg{42, 4};
  const auto far = mc_power_full(p, 1000.0 * r, 1000000, cfg);
  const auto ang = mc_power_angular(p, 1000.0 * r, 1000000, cfg);
  const double joint = std::hypot(far.std_error, ang.std_error);
  EXPECT_LT(std::abs(far.mean - ang.mean), 3.0 * joint);
  EXPECT_NEAR(far.mean / power_random_orientation(p, 1000.0 * r).value, 1.0, 0.02);
  const auto near = mc_power_full(p, 3.0 * r, 1000000, cfg);
  const double bias = near.mean / power_random_orientation(p, 3.0 * r).value - 1.0;
  EXPECT_GT(std::abs(bias), 5.0 * near.std_error / near.mean);
}

TEST(McOracle, StandardErrorScaling) {
  const SystemParams p = default_params();
  const auto a = mc_power_angular(p, 20.0, 10000, {9, 4});
  const auto b = mc_power_angular(p, 20.0, 100000, {9, 4});
  const auto c = mc_power_angular(p, 20.0, 1000000, {9, 4});
  EXPECT_NEAR(a.std_error / b.std_error, std::sqrt(10.0), 0.2 * std::sqrt(10.0));
  EXPECT_NEAR(b.std_error / c.std_error, std::sqrt(10.0), 0.2 * std::sqrt(10.0));
}

TEST(McOracle, KsStatistic) {
  EXPECT_DOUBLE_EQ(ks_statistic({}, [](double) { return 0.0; }), 0.0);
  EXPECT_NEAR(ks_statistic({0.5}, [](double x) { return x; }), 0.5, 1e-15);
}
