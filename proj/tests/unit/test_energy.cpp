#include <gtest/gtest.h>

#include <cmath>

#include "uowc/energy.hpp"

using namespace uowc;

namespace {
SystemParams dark_params(double phi_deg = 60.0) {
  return default_params().with([&](ParamValues& v) {
    v.solar_surface_irradiance = 0.0;
    v.phi_half = deg_to_rad(phi_deg);
  });
}
}  // namespace

TEST(Energy, TotalBits) {
  const SystemParams p = default_params();
  EXPECT_NEAR(total_bits(1e-3, 1.0, p), 318309886.18, 0.01);
  EXPECT_NEAR(total_bits(2e-3, 1.0, p) / total_bits(1e-3, 1.0, p), 0.5, 1e-15);
  const auto twice = p.with([](ParamValues& v) { v.energy_total *= 2.0; });
  EXPECT_NEAR(total_bits(1e-3, 1.0, twice) / total_bits(1e-3, 1.0, p), 2.0, 1e-15);
  EXPECT_THROW(total_bits(0.0, 1.0, p), DomainError);
}

TEST(Energy, LinkKpisGeometry) {
  const SystemParams p = dark_params();
  const auto r = link_kpis(1e-3, 8.0, 0.0, p);
  EXPECT_NEAR(r.geometry.link_length, 25.713324142937908, 1e-8);
  EXPECT_NEAR(r.geometry.depth, 12.848651984236851, 1e-8);
  EXPECT_NEAR(r.p_rx, power_offset(p, r.geometry.link_length, 0.0).value, 1e-20);
  EXPECT_DOUBLE_EQ(r.ber, ber_ook(r.snr));
  const auto off = link_kpis(1e-3, 8.0, optimal_offset_exact(p->phi_half), p);
  EXPECT_NEAR(off.p_rx / r.p_rx, 1.154700538, 1e-6);
}

TEST(Energy, LinkQuantileOption) {
  const SystemParams p = dark_params();
  EnergyOptions opts;
  opts.link_quantile = 0.5;
  EXPECT_NEAR(link_kpis(1e-3, 8.0, 0.0, p, opts).geometry.link_length, 25.48271031563688, 1e-9);
}

TEST(EnergyProperty, BerDecreasesWithPower) {
  const SystemParams p = dark_params();
  double prev = 1.0;
  for (double ptx = 1e-3; ptx <= 8.0; ptx *= 1.3) {
    const double b = link_kpis(1e-3, ptx, 0.0, p).ber;
    EXPECT_LE(b, prev);
    prev = b;
  }
}

TEST(Energy, MinPowerBranches) {
  const SystemParams p = dark_params();
  const auto floor = min_power_for_ber(1.0, 0.0, p);
  EXPECT_TRUE(floor.feasible);
  EXPECT_TRUE(floor.floor_active);
  EXPECT_DOUBLE_EQ(floor.p_tx, p->ptx_floor);

  const auto none = min_power_for_ber(1e-6, 0.0, p);
  EXPECT_FALSE(none.feasible);
  EXPECT_TRUE(std::isnan(none.p_tx));
  EXPECT_GT(none.ber, p->ber_threshold);

  const auto mid = min_power_for_ber(1e-3, 0.0, p);
  EXPECT_TRUE(mid.feasible);
  EXPECT_FALSE(mid.floor_active);
  EXPECT_NEAR(mid.p_tx, 0.0749, 1e-3);
  EXPECT_LE(mid.ber, p->ber_threshold);
  EXPECT_LT(std::abs(mid.ber - p->ber_threshold) / p->ber_threshold, 1e-3);
}

TEST(Energy, StrategyPowerRatio) {
  for (auto [phi, lambda, ratio, tol] : {std::tuple{60.0, 1e-3, 0.866025, 1e-4}, std::tuple{30.0, 1e-3, 0.806148, 1e-4}}) {
    const SystemParams p = dark_params(phi);
    const auto base = min_power_for_ber(lambda, 0.0, p);
    const auto off = min_power_for_ber(lambda, optimal_offset_exact(p->phi_half), p);
    ASSERT_TRUE(base.feasible && off.feasible);
    ASSERT_FALSE(base.floor_active || off.floor_active);
    EXPECT_NEAR(off.p_tx / base.p_tx, ratio, tol) << phi;
  }
}

TEST(EnergySweep, RecordInvariants) {
  const SystemParams p = dark_params();
  const auto records = density_sweep(p, default_lambda_grid());
  bool floor_seen = false;
  double prev_base = INFINITY;
  for (const auto& r : records) {
    if (r.feasible_base) {
      EXPECT_EQ(r.floor_active_base, r.ptx_min_base == p->ptx_floor);
      EXPECT_GE(r.ptx_min_base, p->ptx_floor);
      EXPECT_LE(r.ptx_min_base, p->ptx_max);
      EXPECT_GT(r.nb_base, 0.0);
      if (!floor_seen) {
        EXPECT_LE(r.ptx_min_base, prev_base);
      }
      prev_base = r.ptx_min_base;
      floor_seen = floor_seen || r.floor_active_base;
    } else {
      EXPECT_EQ(r.nb_base, 0.0);
    }
    if (r.feasible_base && r.feasible_offset) {
      EXPECT_GE(r.nb_offset, r.nb_base);
    }
    if (r.floor_active_base && r.floor_active_offset) {
      EXPECT_EQ(r.nb_offset, r.nb_base);
    }
  }
  EXPECT_TRUE(floor_seen);
}

TEST(EnergySweep, ContinuousAcrossFloorActivation) {
  const SystemParams p = dark_params();
  // locate the activation density by bisection on the floor flag
  double lo = 1e-3, hi = 1e-2;
  for (int i = 0; i < 60; ++i) {
    const double mid = std::sqrt(lo * hi);
    (min_power_for_ber(mid, 0.0, p).floor_active ? hi : lo) = mid;
  }
  auto nb = [&](double l) { return total_bits(l, min_power_for_ber(l, 0.0, p).p_tx, p); };
  EXPECT_NEAR(nb(lo) / nb(hi), 1.0, 1e-5);
}

TEST(EnergySweep, ParallelMatchesSerial) {
  const SystemParams p = dark_params();
  EnergyOptions par;
  par.workers = 4;
  const auto grid = numerics::linspace(1e-4, 1.0, 40, true);
  const auto a = density_sweep(p, grid);
  const auto b = density_sweep(p, grid, par);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].lambda_2d, b[i].lambda_2d);
    EXPECT_EQ(std::isnan(a[i].ptx_min_base), std::isnan(b[i].ptx_min_base));
    if (a[i].feasible_base) {
      EXPECT_EQ(a[i].ptx_min_base, b[i].ptx_min_base);
    }
    EXPECT_EQ(a[i].nb_offset, b[i].nb_offset);
  }
}

TEST(EnergySweep, RejectsBadGrid) {
  const SystemParams p = dark_params();
  EXPECT_THROW(density_sweep(p, {1e-3, 1e-3}), DomainError);
  EXPECT_THROW(density_sweep(p, {-1.0, 1.0}), DomainError);
  EXPECT_TRUE(density_sweep(p, {}).empty());
}

TEST(EnergyOptimize, SingleFeasiblePoint) {
  const SystemParams p = dark_params();
  const auto r = optimize(p, Strategy::baseline, std::vector<double>{1e-3});
  EXPECT_DOUBLE_EQ(r.lambda_star, 1e-3);
  EXPECT_FALSE(r.refined);
}

TEST(EnergyOptimize, AllInfeasibleThrows) {
  const SystemParams p = default_params();  // raw solar term swamps the link at level 1
  EXPECT_THROW(optimize(p, Strategy::baseline, std::vector<double>{1e-5, 1e-4, 1e-3}), InfeasibleError);
}

TEST(EnergyOptimize, LevelOneInteriorOptimum) {
  const SystemParams p = dark_params();
  const auto base = optimize(p, Strategy::baseline);
  const auto off = optimize(p, Strategy::offset);
  EXPECT_TRUE(base.unimodal);
  EXPECT_FALSE(base.at_grid_edge);
  EXPECT_TRUE(base.refined);
  EXPECT_GE(base.nb_star, base.best_record.nb_base);
  EXPECT_GT(off.nb_star, base.nb_star);
}

TEST(EnergyOptimize, DeeperLevelsHitTheFloorFirst) {
  for (int level : {2, 3}) {
    const SystemParams p = apply_level(dark_params(), level);
    const auto records = density_sweep(p, default_lambda_grid());
    std::size_t first_floor = records.size();
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (records[i].floor_active_base) {
        first_floor = i;
        break;
      }
    }
    ASSERT_LT(first_floor, records.size()) << level;
    for (std::size_t i = first_floor + 1; i < records.size(); ++i) {
      EXPECT_LT(records[i].nb_base, records[i - 1].nb_base) << level;
    }
  }
}
