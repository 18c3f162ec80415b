#include <gtest/gtest.h>

#include <cmath>

#include "uowc/sipm.hpp"

using namespace uowc;

namespace {
// Deep enough that the solar term vanishes.
constexpr double deep = 1000.0;
constexpr double p_ref = 5.490137065726458e-6;
}  // namespace

TEST(Sipm, Responsivity) {
  EXPECT_NEAR(responsivity(default_params()), 0.1125143379260215, 1e-15);
}

TEST(Sipm, Photocurrent) {
  const SystemParams p = default_params();
  EXPECT_DOUBLE_EQ(photocurrent(0.0, p), 0.0);
  EXPECT_NEAR(photocurrent(p_ref, p), 0.6177191370733228, 1e-13);
  EXPECT_THROW(photocurrent(-1.0, p), DomainError);
}

TEST(Sipm, ExcessNoiseFactor) {
  EXPECT_DOUBLE_EQ(excess_noise_factor(0.0), 1.0);
  EXPECT_NEAR(excess_noise_factor(0.08), 1.0909665458954410, 1e-14);
  EXPECT_THROW(excess_noise_factor(0.6322), DomainError);
  EXPECT_NO_THROW(excess_noise_factor(0.632));
  EXPECT_THROW(excess_noise_factor(-0.01), DomainError);
}

TEST(Sipm, SolarPower) {
  const SystemParams p = default_params();
  EXPECT_NEAR(solar_power(p, 0.0), 77515.69, 0.01);
  EXPECT_NEAR(solar_power(p, 60.0) / solar_power(p, 0.0), std::exp(-12.0), 1e-18);
  EXPECT_LT(solar_power(p, 1e4), 1e-300);
  const SystemParams band = p.with([](ParamValues& v) { v.solar_spectral_fraction_mode = SolarSpectralMode::band_fraction; });
  EXPECT_NEAR(solar_power(band, 0.0) / solar_power(p, 0.0), 1.0 / 1000.0, 1e-15);
  EXPECT_THROW(solar_power(p, -1.0), DomainError);
}

TEST(Sipm, NoiseVariances) {
  const SystemParams p = default_params();
  const auto n = noise_variances(p_ref, p, deep);
  EXPECT_NEAR(n.sigma_th2 / 3.20310568e-16, 1.0, 1e-9);
  EXPECT_NEAR(n.sigma_d2 / 5.383597013592842e-8, 1.0, 1e-12);
  EXPECT_NEAR(n.sigma_q2 / 2.159448637394213e-7, 1.0, 1e-12);
  EXPECT_LT(n.sigma_solar2, 1e-60);
  EXPECT_EQ(n.sigma_total2, n.sigma_q2 + n.sigma_d2 + n.sigma_solar2 + n.sigma_th2);
}

TEST(Sipm, ZeroSignalLeavesDarkAndThermal) {
  const auto n = noise_variances(0.0, default_params(), deep);
  EXPECT_EQ(n.sigma_q2, 0.0);
  EXPECT_GT(n.sigma_d2, 0.0);
  EXPECT_GT(n.sigma_th2, 0.0);
  EXPECT_EQ(snr(n), 0.0);
}

TEST(Sipm, Snr) {
  const SystemParams p = default_params();
  EXPECT_NEAR(snr(p_ref, p, deep), 1414395.998, 1e-2);
  // near the shot limit: slightly better than linear because the fixed terms shrink in relative weight
  const double s1 = snr(1e-3, p, deep);
  const double s10 = snr(1e-2, p, deep);
  EXPECT_GT(s10 / s1, 10.0);
  EXPECT_LT(s10 / s1, 10.05);
}

TEST(Sipm, Ber) {
  EXPECT_DOUBLE_EQ(ber_ook(0.0), 0.5);
  EXPECT_NEAR(ber_ook(22.595) / 1.0000222e-6, 1.0, 1e-6);
  EXPECT_EQ(ber_ook(1e6), 0.0);
  EXPECT_THROW(ber_ook(-1.0), DomainError);
  EXPECT_NEAR(snr_for_ber(1e-6), 22.59504265970845, 1e-9);
  EXPECT_NEAR(ber_ook(snr_for_ber(1e-3)) / 1e-3, 1.0, 1e-12);
  EXPECT_THROW(snr_for_ber(0.5), DomainError);
}

TEST(SipmProperty, MonotoneChain) {
  const SystemParams p = default_params();
  double prev_snr = -1.0, prev_ber = 1.0;
  for (double prx = 1e-12; prx < 1e-2; prx *= 1.5) {
    const double s = snr(prx, p, 12.0);
    EXPECT_GT(s, prev_snr);
    const double b = ber_ook(s);
    EXPECT_LE(b, prev_ber);
    prev_snr = s;
    prev_ber = b;
  }
}

TEST(SipmProperty, SolarDepthRatio) {
  const SystemParams p = default_params();
  for (double d : {0.0, 3.0, 12.5, 40.0}) {
    for (double delta : {0.5, 5.0, 20.0}) {
      const double r = noise_variances(1e-6, p, d + delta).sigma_solar2 / noise_variances(1e-6, p, d).sigma_solar2;
      EXPECT_NEAR(r / std::exp(-p->solar_attenuation * delta), 1.0, 1e-12);
    }
  }
}
