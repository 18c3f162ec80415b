#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string_view>
#include <thread>
#include <vector>

#include "uowc/config.hpp"
#include "uowc/errors.hpp"
#include "uowc/geometry.hpp"
#include "uowc/numerics.hpp"
#include "uowc/rx_power.hpp"
#include "uowc/sipm.hpp"

namespace uowc {

struct EnergyOptions {
  /// When set, the link length is this quantile of the nearest-neighbour law
  /// instead of its mean.
  std::optional<double> link_quantile;
  /// Relative bracket width at which the minimum-power bisection stops.
  double power_rel_width = 1e-6;
  /// Relative tolerance on the refined optimum density.
  double lambda_rel_tol = 1e-4;
  unsigned workers = 1;
};

struct LinkGeometry {
  double link_length;  // m
  double depth;        // m, receiver depth used for the solar term
};

inline LinkGeometry link_geometry(double lambda_2d, const SystemParams& params, const EnergyOptions& opts = {}) {
  const NNDistribution dist(lambda_2d, params->slab_depth);
  const double L = opts.link_quantile ? dist.inverse_cdf(*opts.link_quantile) : dist.mean_distance();
  return {L, dist.expected_link_depth()};
}

struct LinkReport {
  LinkGeometry geometry;
  double p_tx;
  double delta;
  double p_rx;
  NoiseBreakdown noise;
  double snr;
  double ber;
};

namespace detail {

/// Received power per watt transmitted for the given link and offset.
inline double unit_rx_power(const SystemParams& params, double L, double delta) {
  return power_offset(params, L, delta).value / params->tx_power;
}

inline LinkReport evaluate_link(const SystemParams& params, const LinkGeometry& geom, double unit_gain,
                                double p_tx, double delta) {
  LinkReport r{geom, p_tx, delta, p_tx * unit_gain, {}, 0.0, 0.0};
  r.noise = noise_variances(r.p_rx, params, geom.depth);
  r.snr = snr(r.noise);
  r.ber = ber_ook(r.snr);
  return r;
}

}  // namespace detail

/// Received power, SNR and BER of the representative link at density Lambda
/// when transmitting p_tx with receiver offset delta.
inline LinkReport link_kpis(double lambda_2d, double p_tx, double delta, const SystemParams& params,
                            const EnergyOptions& opts = {}) {
  if (!(p_tx > 0.0)) throw DomainError("link_kpis: p_tx must be > 0");
  const LinkGeometry geom = link_geometry(lambda_2d, params, opts);
  return detail::evaluate_link(params, geom, detail::unit_rx_power(params, geom.link_length, delta), p_tx, delta);
}

struct MinPower {
  double p_tx;        // W; NaN when infeasible
  bool feasible;
  bool floor_active;  // clamped to ptx_floor
  double ber;         // BER at p_tx (at ptx_max when infeasible)
};

namespace detail {

inline MinPower min_power(const SystemParams& params, const LinkGeometry& geom, double delta,
                          const EnergyOptions& opts) {
  const double unit = unit_rx_power(params, geom.link_length, delta);
  auto ber_at = [&](double p) { return evaluate_link(params, geom, unit, p, delta).ber; };
  const double th = params->ber_threshold;
  const double lo = params->ptx_floor;
  const double hi = params->ptx_max;

  const double ber_lo = ber_at(lo);
  if (ber_lo <= th) return {lo, true, true, ber_lo};
  const double ber_hi = ber_at(hi);
  if (ber_hi > th) return {std::numeric_limits<double>::quiet_NaN(), false, false, ber_hi};

  // BER is decreasing in p; keep BER(b) <= th < BER(a).
  double a = lo;
  double b = hi;
  while (b - a > opts.power_rel_width * b) {
    const double mid = 0.5 * (a + b);
    if (mid <= a || mid >= b) break;
    if (ber_at(mid) <= th) {
      b = mid;
    } else {
      a = mid;
    }
  }
  return {b, true, false, ber_at(b)};
}

}  // namespace detail

/// Smallest transmit power in [ptx_floor, ptx_max] meeting BER <= BER_th.
inline MinPower min_power_for_ber(double lambda_2d, double delta, const SystemParams& params,
                                  const EnergyOptions& opts = {}) {
  return detail::min_power(params, link_geometry(lambda_2d, params, opts), delta, opts);
}

/// N_b = B E_total / (A Lambda P_Tx), A the deployment disc area.
inline double total_bits(double lambda_2d, double p_tx, const SystemParams& params) {
  if (!(lambda_2d > 0.0) || !(p_tx > 0.0)) throw DomainError("total_bits: density and power must be > 0");
  return params->bandwidth * params->energy_total / (params.deploy_area() * lambda_2d * p_tx);
}

enum class Strategy { baseline, offset };

inline std::string_view to_string(Strategy s) { return s == Strategy::baseline ? "baseline" : "offset"; }

inline double strategy_delta(const SystemParams& params, Strategy s) {
  return s == Strategy::baseline ? 0.0 : optimal_offset_exact(params->phi_half);
}

struct SweepRecord {
  double lambda_2d;
  double mean_link_m;
  double mean_depth_m;
  double ptx_min_base;
  double ptx_min_offset;
  double nb_base;
  double nb_offset;
  bool floor_active_base;
  bool floor_active_offset;
  bool feasible_base;
  bool feasible_offset;

  double ptx(Strategy s) const { return s == Strategy::baseline ? ptx_min_base : ptx_min_offset; }
  double nb(Strategy s) const { return s == Strategy::baseline ? nb_base : nb_offset; }
  bool feasible(Strategy s) const { return s == Strategy::baseline ? feasible_base : feasible_offset; }
  bool floor_active(Strategy s) const { return s == Strategy::baseline ? floor_active_base : floor_active_offset; }
};

inline SweepRecord sweep_cell(double lambda_2d, const SystemParams& params, double delta_opt,
                              const EnergyOptions& opts) {
  const LinkGeometry geom = link_geometry(lambda_2d, params, opts);
  const MinPower base = detail::min_power(params, geom, 0.0, opts);
  const MinPower off = detail::min_power(params, geom, delta_opt, opts);
  SweepRecord r{};
  r.lambda_2d = lambda_2d;
  r.mean_link_m = geom.link_length;
  r.mean_depth_m = geom.depth;
  r.ptx_min_base = base.p_tx;
  r.ptx_min_offset = off.p_tx;
  r.nb_base = base.feasible ? total_bits(lambda_2d, base.p_tx, params) : 0.0;
  r.nb_offset = off.feasible ? total_bits(lambda_2d, off.p_tx, params) : 0.0;
  r.floor_active_base = base.floor_active;
  r.floor_active_offset = off.floor_active;
  r.feasible_base = base.feasible;
  r.feasible_offset = off.feasible;
  return r;
}

/// Both strategies at every density of a strictly increasing grid. Cells are
/// independent; the result order is the grid order for any worker count.
inline std::vector<SweepRecord> density_sweep(const SystemParams& params, const std::vector<double>& lambda_grid,
                                              const EnergyOptions& opts = {}) {
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    if (!(lambda_grid[i] > 0.0)) throw DomainError("density_sweep: densities must be > 0");
    if (i > 0 && !(lambda_grid[i] > lambda_grid[i - 1])) throw DomainError("density_sweep: grid must increase strictly");
  }
  const double delta_opt = optimal_offset_exact(params->phi_half);
  std::vector<SweepRecord> out(lambda_grid.size());
  const unsigned workers = std::max(1u, std::min<unsigned>(opts.workers, static_cast<unsigned>(lambda_grid.size())));
  if (workers <= 1) {
    for (std::size_t i = 0; i < lambda_grid.size(); ++i) out[i] = sweep_cell(lambda_grid[i], params, delta_opt, opts);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < lambda_grid.size(); i = next++) {
        out[i] = sweep_cell(lambda_grid[i], params, delta_opt, opts);
      }
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

/// 25 points per decade over [1e-5, 10] nodes/m^2.
inline std::vector<double> default_lambda_grid() { return numerics::linspace(1e-5, 10.0, 151, true); }

struct OptimizeResult {
  Strategy strategy;
  SweepRecord best_record;  // grid argmax
  double lambda_star;       // refined optimum density
  double ptx_star;
  double nb_star;
  bool floor_active_star;
  bool refined;      // golden-section refinement ran
  bool unimodal;     // N_b over the feasible grid points rises then falls
  bool at_grid_edge; // argmax on the first/last feasible grid point
};

/// Density maximising N_b(Lambda, ptx_min(Lambda)) for one strategy: grid
/// argmax, then golden-section refinement in log Lambda between the argmax's
/// grid neighbours.
inline OptimizeResult optimize(const SystemParams& params, Strategy strategy, const std::vector<double>& lambda_grid,
                               const EnergyOptions& opts = {}) {
  const auto records = density_sweep(params, lambda_grid, opts);
  std::vector<std::size_t> feasible;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].feasible(strategy)) feasible.push_back(i);
  }
  if (feasible.empty()) throw InfeasibleError("optimize: no feasible density on the grid");

  std::size_t best = feasible.front();
  for (std::size_t i : feasible) {
    if (records[i].nb(strategy) > records[best].nb(strategy)) best = i;
  }

  bool unimodal = true;
  bool falling = false;
  for (std::size_t k = 1; k < feasible.size(); ++k) {
    const double prev = records[feasible[k - 1]].nb(strategy);
    const double cur = records[feasible[k]].nb(strategy);
    if (cur < prev) falling = true;
    else if (cur > prev && falling) unimodal = false;
  }

  OptimizeResult res{};
  res.strategy = strategy;
  res.best_record = records[best];
  res.lambda_star = records[best].lambda_2d;
  res.ptx_star = records[best].ptx(strategy);
  res.nb_star = records[best].nb(strategy);
  res.floor_active_star = records[best].floor_active(strategy);
  res.unimodal = unimodal;
  res.at_grid_edge = best == feasible.front() || best == feasible.back();

  const bool has_neighbours = best > 0 && best + 1 < records.size() && records[best - 1].feasible(strategy) &&
                              records[best + 1].feasible(strategy);
  if (!unimodal || !has_neighbours) return res;

  const double delta = strategy_delta(params, strategy);
  auto objective = [&](double log_lambda) {
    const double lambda = std::exp(log_lambda);
    const MinPower mp = min_power_for_ber(lambda, delta, params, opts);
    return mp.feasible ? total_bits(lambda, mp.p_tx, params) : 0.0;
  };
  const auto ext = numerics::golden_section_maximize(objective, std::log(records[best - 1].lambda_2d),
                                                     std::log(records[best + 1].lambda_2d), opts.lambda_rel_tol);
  res.refined = true;
  if (ext.value > res.nb_star) {
    res.lambda_star = std::exp(ext.x);
    const MinPower mp = min_power_for_ber(res.lambda_star, delta, params, opts);
    res.ptx_star = mp.p_tx;
    res.floor_active_star = mp.floor_active;
    res.nb_star = total_bits(res.lambda_star, mp.p_tx, params);
  }
  return res;
}

inline OptimizeResult optimize(const SystemParams& params, Strategy strategy, const EnergyOptions& opts = {}) {
  return optimize(params, strategy, default_lambda_grid(), opts);
}

}  // namespace uowc
