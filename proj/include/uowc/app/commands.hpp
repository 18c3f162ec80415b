#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "uowc/channel.hpp"
#include "uowc/config.hpp"
#include "uowc/energy.hpp"
#include "uowc/errors.hpp"
#include "uowc/geometry.hpp"
#include "uowc/mc_oracle.hpp"
#include "uowc/numerics.hpp"
#include "uowc/report.hpp"
#include "uowc/rx_power.hpp"
#include "uowc/sipm.hpp"

namespace uowc::app {

using report::Cell;
using report::Table;

inline constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

inline Cell count_cell(std::size_t n) { return static_cast<std::int64_t>(n); }
inline Cell seed_cell(std::uint64_t s) { return std::to_string(s); }  // u64 does not fit int64 / JSON doubles

/// Result of one command: tables plus the process exit code it implies.
struct CommandOutput {
  std::vector<Table> tables;
  int exit_code = 0;
  std::string message;  // reported on stderr when non-empty
};

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_config = 2, exit_infeasible = 3, exit_validation = 4 };

/// Inclusive arithmetic range start, start+step, ... <= stop (with a little
/// slack so that decimal steps reach the end point).
inline std::vector<double> stepped(double start, double stop, double step) {
  if (!(step > 0.0) || !(stop >= start)) throw DomainError("range needs step > 0 and stop >= start");
  std::vector<double> out;
  const auto n = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) out.push_back(start + static_cast<double>(i) * step);
  return out;
}

// ---------------------------------------------------------------------------
// Geometry

struct NNDistArgs {
  std::optional<double> s_max;
  std::size_t points = 201;
};

inline Table nn_dist_table(const NNDistribution& dist, const NNDistArgs& args) {
  if (args.points < 2) throw DomainError("nn-dist needs at least 2 points");
  const double s_max = args.s_max.value_or(dist.inverse_cdf(1.0 - 1e-6));
  Table t{"nn_dist", {"s_m", "survival", "pdf_per_m", "cdf"}, {}};
  for (double s : numerics::linspace(0.0, s_max, args.points)) {
    t.add_row({s, dist.survival(s), dist.pdf(s), dist.cdf(s)});
  }
  return t;
}

struct DepthArgs {
  std::size_t trials = 0;  // 0: closed form only
};

inline Table depth_table(const SystemParams& params, const DepthArgs& args, const mc::McConfig& cfg) {
  const NNDistribution dist(params);
  const double depth = dist.expected_link_depth();
  Table t{"depth",
          {"lambda_per_m2", "slab_depth_m", "expected_depth_m", "mean_distance_m", "median_distance_m"},
          {}};
  std::vector<Cell> row{params->lambda_2d, params->slab_depth, depth, dist.mean_distance(), dist.median()};
  if (args.trials > 0) {
    for (const char* c : {"mc_depth_m", "mc_std_error_m", "z_score", "trials", "seed"}) t.columns.emplace_back(c);
    const auto est = mc::mc_expected_depth(params->lambda_2d, params->slab_depth, args.trials, cfg);
    row.insert(row.end(), {est.mean, est.std_error, est.z_score(depth), count_cell(est.n_samples), seed_cell(cfg.seed)});
  }
  t.add_row(std::move(row));
  return t;
}

// ---------------------------------------------------------------------------
// Received power

struct PowerArgs {
  std::optional<double> link_length;
  std::string variant = "all";  // random | main-lobe | offset | pat | all
  std::optional<double> delta_deg;  // offset variant; default: exact optimum
  double epsilon_deg = 0.0;
};

inline double default_link_length(const SystemParams& params) { return NNDistribution(params).mean_distance(); }

inline Table power_table(const SystemParams& params, const PowerArgs& args) {
  const double L = args.link_length.value_or(default_link_length(params));
  const bool all = args.variant == "all";
  if (!all && args.variant != "random" && args.variant != "main-lobe" && args.variant != "offset" &&
      args.variant != "pat") {
    throw DomainError("unknown power variant '" + args.variant + "'");
  }
  Table t{"power", {"variant", "link_length_m", "offset_deg", "pointing_error_deg", "power_w"}, {}};
  auto add = [&](const PowerResult& p) {
    t.add_row({std::string(to_string(p.variant)), p.link_length,
               p.offset_angle ? rad_to_deg(*p.offset_angle) : nan_value,
               p.pointing_error ? rad_to_deg(*p.pointing_error) : nan_value, p.value});
  };
  if (all || args.variant == "random") add(power_random_orientation(params, L));
  if (all || args.variant == "main-lobe") add(power_main_lobe(params, L));
  if (all || args.variant == "offset") {
    const double delta = args.delta_deg ? deg_to_rad(*args.delta_deg) : optimal_offset_exact(params->phi_half);
    add(power_offset(params, L, delta));
  }
  if (all || args.variant == "pat") add(pat_power(params, L, deg_to_rad(args.epsilon_deg)));
  return t;
}

struct ChannelGainArgs {
  double theta_deg = 0.0;
  double psi_deg = 0.0;
  std::optional<double> link_length;
};

inline Table channel_gain_table(const SystemParams& params, const ChannelGainArgs& args) {
  const RayGeometry g{deg_to_rad(args.theta_deg), deg_to_rad(args.psi_deg),
                      args.link_length.value_or(default_link_length(params))};
  const double h = los_channel_gain(g, params);
  Table t{"channel_gain",
          {"theta_deg", "psi_deg", "link_length_m", "lambertian_order", "concentrator_gain", "channel_gain",
           "p_rx_w"},
          {}};
  t.add_row({args.theta_deg, args.psi_deg, g.link_length, lambertian_order(params->phi_half),
             concentrator_gain(g.incidence_angle, params->concentrator_index, params->fov_semi_angle), h,
             params->tx_power * h});
  return t;
}

struct PhiRange {
  double min_deg;
  double max_deg;
  double step_deg;
};

inline Table offset_opt_table(const std::vector<double>& phis_deg, std::string name = "offset_opt") {
  Table t{std::move(name), {"phi_half_deg", "delta_exact_deg", "delta_approx_deg"}, {}};
  for (double phi : phis_deg) {
    const double r = deg_to_rad(phi);
    t.add_row({phi, rad_to_deg(optimal_offset_exact(r)), rad_to_deg(optimal_offset_approx(r))});
  }
  return t;
}

struct PatArgs {
  double eps_step_deg = 1.0;
  std::optional<double> link_length;
  std::optional<double> delta_deg;  // strategy offset; default exact optimum
};

/// Epsilon sweep plus the crossover for each strategy offset requested.
inline CommandOutput pat_tables(const SystemParams& params, const PatArgs& args, const std::string& stem,
                                bool with_baseline) {
  const double L = args.link_length.value_or(default_link_length(params));
  const double delta_opt = optimal_offset_exact(params->phi_half);
  const double delta = args.delta_deg ? deg_to_rad(*args.delta_deg) : delta_opt;
  const double axial = pat_power(params, L, 0.0).value;
  const double offset = power_offset(params, L, delta).value;
  const double baseline = power_offset(params, L, 0.0).value;

  CommandOutput out;
  Table sweep{stem, {"epsilon_deg", "pat_power_w", "offset_power_w", "pat_normalized", "offset_normalized"}, {}};
  if (with_baseline) sweep.columns.insert(sweep.columns.end(), {"baseline_power_w", "baseline_normalized"});
  for (double eps : stepped(0.0, 90.0, args.eps_step_deg)) {
    const double p = pat_power(params, L, deg_to_rad(eps)).value;
    std::vector<Cell> row{eps, p, offset, p / axial, offset / axial};
    if (with_baseline) row.insert(row.end(), {baseline, baseline / axial});
    sweep.add_row(std::move(row));
  }
  out.tables.push_back(std::move(sweep));

  Table cross{stem + "_crossover", {"phi_half_deg", "strategy_delta_deg", "link_length_m", "crossover_deg"}, {}};
  std::vector<double> deltas{delta};
  if (with_baseline) deltas.insert(deltas.begin(), 0.0);
  for (double d : deltas) {
    double eps = nan_value;
    try {
      eps = rad_to_deg(pat_crossover(params, L, d));
    } catch (const NoCrossing& e) {
      out.exit_code = exit_infeasible;
      out.message = e.what();
    }
    cross.add_row({rad_to_deg(params->phi_half), rad_to_deg(d), L, eps});
  }
  out.tables.push_back(std::move(cross));
  return out;
}

inline Table grid_table(const PowerGrid& grid, const std::string& name, bool density) {
  Table t{name, {}, {}};
  if (density) {
    t.columns = {"slab_depth_m", "lambda_per_m2", "mean_link_m", "power_w", "normalized"};
  } else {
    t.columns = {"phi_half_deg", "delta_deg", "valid", "power_w", "normalized"};
  }
  for (const auto& c : grid.cells) {
    if (density) {
      t.add_row({c.row_value, c.col_value, c.power.link_length, c.power.value, c.normalized});
    } else {
      t.add_row({rad_to_deg(c.row_value), rad_to_deg(c.col_value), c.valid, c.power.value, c.normalized});
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Receiver

struct SnrArgs {
  std::optional<double> p_rx;
  std::optional<double> depth;
  std::optional<double> p_tx;
  double delta_deg = 0.0;
};

inline Table snr_table(const SystemParams& params, const SnrArgs& args) {
  Table t{"snr",
          {"link_length_m", "p_tx_w", "p_rx_w", "depth_m", "signal_current_a", "sigma_q2", "sigma_d2",
           "sigma_solar2", "sigma_th2", "sigma_total2", "solar_power_w", "snr", "ber"},
          {}};
  double L = nan_value;
  double p_tx = nan_value;
  double p_rx = 0.0;
  double depth = 0.0;
  if (args.p_rx) {
    p_rx = *args.p_rx;
    depth = args.depth.value_or(NNDistribution(params).expected_link_depth());
  } else {
    const auto geom = link_geometry(params->lambda_2d, params);
    p_tx = args.p_tx.value_or(params->tx_power);
    L = geom.link_length;
    depth = args.depth.value_or(geom.depth);
    p_rx = p_tx * detail::unit_rx_power(params, L, deg_to_rad(args.delta_deg));
  }
  const auto n = noise_variances(p_rx, params, depth);
  const double s = snr(n);
  t.add_row({L, p_tx, p_rx, depth, n.signal_current, n.sigma_q2, n.sigma_d2, n.sigma_solar2, n.sigma_th2,
             n.sigma_total2, n.solar_power, s, ber_ook(s)});
  return t;
}

inline CommandOutput ber_tables(const SystemParams& params, const std::vector<double>& snrs,
                                std::vector<double> targets) {
  CommandOutput out;
  if (!snrs.empty()) {
    Table t{"ber", {"snr", "ber"}, {}};
    for (double s : snrs) t.add_row({s, ber_ook(s)});
    out.tables.push_back(std::move(t));
  }
  if (targets.empty() && snrs.empty()) targets.push_back(params->ber_threshold);
  if (!targets.empty()) {
    Table t{"snr_required", {"ber", "snr_required"}, {}};
    for (double b : targets) t.add_row({b, snr_for_ber(b)});
    out.tables.push_back(std::move(t));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Energy

inline const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> cols = {
      "lambda_per_m2", "mean_link_m",    "mean_depth_m", "ptx_min_base_w", "ptx_min_offset_w", "nb_base_bits",
      "nb_offset_bits", "floor_base",    "floor_offset", "feasible_base",  "feasible_offset"};
  return cols;
}

inline Table sweep_table(const std::vector<SweepRecord>& records, std::string name) {
  Table t{std::move(name), sweep_columns(), {}};
  for (const auto& r : records) {
    t.add_row({r.lambda_2d, r.mean_link_m, r.mean_depth_m, r.ptx_min_base, r.ptx_min_offset, r.nb_base, r.nb_offset,
               r.floor_active_base, r.floor_active_offset, r.feasible_base, r.feasible_offset});
  }
  return t;
}

struct DensityGridArgs {
  double lambda_min = 1e-5;
  double lambda_max = 10.0;
  std::size_t lambda_count = 151;
  std::optional<double> link_quantile;
};

inline std::vector<double> density_grid(const DensityGridArgs& a) {
  return numerics::linspace(a.lambda_min, a.lambda_max, a.lambda_count, true);
}

inline CommandOutput sweep_output(const SystemParams& params, const DensityGridArgs& args, unsigned workers,
                                  const std::string& name) {
  EnergyOptions opts;
  opts.link_quantile = args.link_quantile;
  opts.workers = workers;
  const auto records = density_sweep(params, density_grid(args), opts);
  CommandOutput out;
  out.tables.push_back(sweep_table(records, name));
  bool any = false;
  for (const auto& r : records) any = any || r.feasible_base || r.feasible_offset;
  if (!any && !records.empty()) {
    out.exit_code = exit_infeasible;
    out.message = "no density on the grid meets the BER threshold within ptx_max";
  }
  return out;
}

inline CommandOutput optimize_output(const SystemParams& params, const DensityGridArgs& args,
                                     const std::vector<Strategy>& strategies, unsigned workers,
                                     const std::string& stem) {
  EnergyOptions opts;
  opts.link_quantile = args.link_quantile;
  opts.workers = workers;
  const auto grid = density_grid(args);
  CommandOutput out = sweep_output(params, args, workers, stem + "_sweep");
  Table summary{stem,
                {"strategy", "delta_deg", "lambda_star_per_m2", "ptx_star_w", "nb_star_bits", "floor_active",
                 "refined", "unimodal", "at_grid_edge", "grid_lambda_per_m2", "grid_nb_bits"},
                {}};
  for (Strategy s : strategies) {
    const double delta_deg = rad_to_deg(strategy_delta(params, s));
    try {
      const auto r = optimize(params, s, grid, opts);
      summary.add_row({std::string(to_string(s)), delta_deg, r.lambda_star, r.ptx_star, r.nb_star,
                       r.floor_active_star, r.refined, r.unimodal, r.at_grid_edge, r.best_record.lambda_2d,
                       r.best_record.nb(s)});
    } catch (const InfeasibleError& e) {
      summary.add_row({std::string(to_string(s)), delta_deg, nan_value, nan_value, 0.0, false, false, false, false,
                       nan_value, 0.0});
      out.exit_code = exit_infeasible;
      out.message = std::string(to_string(s)) + ": " + e.what();
    }
  }
  out.tables.push_back(std::move(summary));
  return out;
}

// ---------------------------------------------------------------------------
// Monte Carlo validation suite

struct McValidateArgs {
  std::size_t samples = 1'000'000;
  std::size_t trials = 100'000;
  double link_length = 20.0;
};

inline CommandOutput mc_validate_output(const SystemParams& params, const McValidateArgs& args,
                                        const mc::McConfig& cfg) {
  Table t{"mc_validate", {"test", "closed_form", "mc_mean", "std_error", "z_score", "tolerance", "pass"}, {}};
  bool all_pass = true;
  auto z_row = [&](const std::string& name, double closed, const mc::McEstimate& e) {
    const double z = e.z_score(closed);
    const bool pass = std::abs(z) <= 3.0;
    all_pass = all_pass && pass;
    t.add_row({name, closed, e.mean, e.std_error, z, 3.0, pass});
  };

  const double lambda = params->lambda_2d;
  const double R = params->slab_depth;
  const NNDistribution dist(lambda, R);
  const auto nn = mc::mc_nn_distance(lambda, R, args.trials, cfg);
  z_row("nn_mean_distance", dist.mean_distance(), nn.mean_distance);
  {
    const bool pass = nn.ks_statistic < 0.01;
    all_pass = all_pass && pass;
    t.add_row({std::string("nn_ks_statistic"), 0.0, nn.ks_statistic, nan_value, nan_value, 0.01, pass});
  }
  z_row("expected_link_depth", dist.expected_link_depth(), mc::mc_expected_depth(lambda, R, args.trials, cfg));

  const double L = args.link_length;
  const double phi = params->phi_half;
  const double delta = optimal_offset_exact(phi);
  z_row("power_random_orientation", power_random_orientation(params, L).value,
        mc::mc_power_angular(params, L, args.samples, cfg));
  z_row("power_main_lobe", power_main_lobe(params, L).value,
        mc::mc_power_angular(params, L, args.samples, cfg, {0.0, phi}));
  z_row("power_offset_optimal", power_offset(params, L, delta).value,
        mc::mc_power_angular(params, L, args.samples, cfg, {delta, delta + phi}));
  {
    const double far = 1000.0 * params.aperture_radius();
    const double closed = power_random_orientation(params, far).value;
    const auto e = mc::mc_power_full(params, far, args.samples, cfg);
    const double rel = std::abs(e.mean - closed) / closed;
    const bool pass = rel < 0.02;
    all_pass = all_pass && pass;
    t.add_row({std::string("power_full_aperture_far"), closed, e.mean, e.std_error, e.z_score(closed), 0.02, pass});
  }
  CommandOutput out;
  out.tables.push_back(std::move(t));
  if (!all_pass) {
    out.exit_code = exit_validation;
    out.message = "one or more Monte Carlo checks failed";
  }
  return out;
}

}  // namespace uowc::app
