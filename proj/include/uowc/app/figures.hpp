#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "uowc/app/commands.hpp"

namespace uowc::app {

inline constexpr std::array<std::string_view, 9> figure_ids = {
    "nn-dist",     "delta-opt",        "pat-compare", "offset-heatmap", "power-validate",
    "phi-sweep",   "strategy-compare", "energy-opt",  "rl-heatmap"};

struct FigureArgs {
  std::size_t trials = 100'000;    // nearest-neighbour realizations
  std::size_t samples = 1'000'000;  // angular samples per power check
  unsigned workers = 1;
  DensityGridArgs density;
};

inline std::string figure_stem(std::string_view id) {
  std::string s = "fig_" + std::string(id);
  std::replace(s.begin(), s.end(), '-', '_');
  return s;
}

namespace figures {

/// Closed-form law next to the empirical CDF of sampled realizations.
inline CommandOutput nn_dist(const SystemParams& params, const FigureArgs& args, const mc::McConfig& cfg) {
  const NNDistribution dist(params);
  const auto nn = mc::mc_nn_distance(params->lambda_2d, params->slab_depth, args.trials, cfg);
  std::vector<double> xs;
  xs.reserve(nn.set.samples.size());
  for (const auto& s : nn.set.samples) xs.push_back(s.distance);
  std::sort(xs.begin(), xs.end());

  Table t = nn_dist_table(dist, {});
  t.name = "fig_nn_dist";
  t.columns.emplace_back("empirical_cdf");
  for (auto& row : t.rows) {
    const double s = std::get<double>(row[0]);
    const auto below = std::upper_bound(xs.begin(), xs.end(), s) - xs.begin();
    row.emplace_back(xs.empty() ? nan_value : static_cast<double>(below) / static_cast<double>(xs.size()));
  }
  Table summary{"fig_nn_dist_summary",
                {"lambda_per_m2", "slab_depth_m", "trials", "seed", "empty_realizations", "window_radius_m",
                 "ks_statistic", "mean_closed_form_m", "mc_mean_m", "mc_std_error_m"},
                {}};
  summary.add_row({params->lambda_2d, params->slab_depth, count_cell(args.trials), seed_cell(cfg.seed),
                   count_cell(nn.set.empty_realizations), nn.set.window_radius, nn.ks_statistic, dist.mean_distance(),
                   nn.mean_distance.mean, nn.mean_distance.std_error});
  CommandOutput out;
  out.tables.push_back(std::move(t));
  out.tables.push_back(std::move(summary));
  return out;
}

inline CommandOutput delta_opt(const SystemParams& params) {
  Table t = offset_opt_table(stepped(10.0, 80.0, 1.0), "fig_delta_opt");
  t.columns.insert(t.columns.end(), {"abs_error_deg", "power_gain_exact", "power_gain_approx"});
  for (auto& row : t.rows) {
    const double phi = deg_to_rad(std::get<double>(row[0]));
    const double exact = deg_to_rad(std::get<double>(row[1]));
    const double approx = deg_to_rad(std::get<double>(row[2]));
    const auto p = params.with([&](ParamValues& v) { v.phi_half = phi; });
    const double base = power_offset(p, 20.0, 0.0).value;
    const bool approx_valid = approx >= 0.0 && approx + phi <= half_pi + offset_domain_slack;
    row.insert(row.end(), {std::abs(rad_to_deg(approx - exact)), power_offset(p, 20.0, exact).value / base,
                           approx_valid ? power_offset(p, 20.0, approx).value / base : nan_value});
  }
  CommandOutput out;
  out.tables.push_back(std::move(t));
  return out;
}

inline CommandOutput offset_heatmap(const SystemParams& params) {
  OffsetGridSpec spec;
  spec.phi_half = {deg_to_rad(5.0), deg_to_rad(85.0), 81, false};
  spec.delta = {0.0, deg_to_rad(45.0), 91, false};
  CommandOutput out;
  out.tables.push_back(grid_table(power_grid(params, spec), "fig_offset_heatmap", false));
  return out;
}

inline CommandOutput rl_heatmap(const SystemParams& params) {
  DensityGridSpec spec;
  spec.slab_depth = {10.0, 6000.0, 40, true};
  spec.lambda_2d = {1e-5, 1.0, 51, true};
  CommandOutput out;
  out.tables.push_back(grid_table(power_grid(params, spec), "fig_rl_heatmap", true));
  return out;
}

/// Closed forms against the angular oracle over a ladder of link lengths,
/// plus one finite-aperture check in the far field.
inline CommandOutput power_validate(const SystemParams& params, const FigureArgs& args, const mc::McConfig& cfg) {
  Table t{"fig_power_validate",
          {"link_length_m", "variant", "closed_form_w", "mc_mean_w", "mc_std_error_w", "z_score", "n_samples",
           "seed"},
          {}};
  const double phi = params->phi_half;
  const double delta = optimal_offset_exact(phi);
  auto add = [&](double L, std::string_view variant, double closed, const mc::McEstimate& e) {
    t.add_row({L, std::string(variant), closed, e.mean, e.std_error, e.z_score(closed), count_cell(e.n_samples),
               seed_cell(cfg.seed)});
  };
  for (double L : {5.0, 10.0, 20.0, 40.0, 80.0}) {
    add(L, "random_orientation", power_random_orientation(params, L).value,
        mc::mc_power_angular(params, L, args.samples, cfg));
    add(L, "main_lobe", power_main_lobe(params, L).value, mc::mc_power_angular(params, L, args.samples, cfg, {0.0, phi}));
    add(L, "offset", power_offset(params, L, delta).value,
        mc::mc_power_angular(params, L, args.samples, cfg, {delta, delta + phi}));
  }
  const double far = 1000.0 * params.aperture_radius();
  add(far, "full_aperture", power_random_orientation(params, far).value,
      mc::mc_power_full(params, far, args.samples, cfg));
  CommandOutput out;
  out.tables.push_back(std::move(t));
  return out;
}

/// Received power and BER of the representative link against phi_half.
inline CommandOutput phi_sweep(const SystemParams& params) {
  Table t{"fig_phi_sweep",
          {"phi_half_deg", "lambertian_order", "delta_opt_deg", "p_rx_base_w", "p_rx_offset_w", "snr_base",
           "snr_offset", "ber_base", "ber_offset"},
          {}};
  for (double phi_deg : stepped(5.0, 85.0, 1.0)) {
    const auto p = params.with([&](ParamValues& v) { v.phi_half = deg_to_rad(phi_deg); });
    const double delta = optimal_offset_exact(p->phi_half);
    const auto base = link_kpis(p->lambda_2d, p->tx_power, 0.0, p);
    const auto off = link_kpis(p->lambda_2d, p->tx_power, delta, p);
    t.add_row({phi_deg, lambertian_order(p->phi_half), rad_to_deg(delta), base.p_rx, off.p_rx, base.snr, off.snr,
               base.ber, off.ber});
  }
  CommandOutput out;
  out.tables.push_back(std::move(t));
  return out;
}

/// Baseline against offset pointing at the configured density, per phi_half.
inline CommandOutput strategy_compare(const SystemParams& params) {
  Table t{"fig_strategy_compare",
          {"phi_half_deg", "delta_opt_deg", "power_gain", "ptx_ratio_analytic", "ptx_min_base_w", "ptx_min_offset_w",
           "ptx_ratio", "floor_base", "floor_offset", "feasible_base", "feasible_offset"},
          {}};
  for (double phi_deg : stepped(10.0, 80.0, 5.0)) {
    const auto p = params.with([&](ParamValues& v) { v.phi_half = deg_to_rad(phi_deg); });
    const double m = lambertian_order(p->phi_half);
    const double delta = optimal_offset_exact(p->phi_half);
    const double gain = offset_factor(m, p->phi_half, delta) / offset_factor(m, p->phi_half, 0.0);
    const auto base = min_power_for_ber(p->lambda_2d, 0.0, p);
    const auto off = min_power_for_ber(p->lambda_2d, delta, p);
    t.add_row({phi_deg, rad_to_deg(delta), gain, 1.0 / gain, base.p_tx, off.p_tx, off.p_tx / base.p_tx,
               base.floor_active, off.floor_active, base.feasible, off.feasible});
  }
  CommandOutput out;
  out.tables.push_back(std::move(t));
  return out;
}

}  // namespace figures

/// Figure data by id. Throws DomainError for an unknown id.
inline CommandOutput run_figure(std::string_view id, const SystemParams& params, const FigureArgs& args,
                                const mc::McConfig& cfg) {
  if (id == "nn-dist") return figures::nn_dist(params, args, cfg);
  if (id == "delta-opt") return figures::delta_opt(params);
  if (id == "pat-compare") return pat_tables(params, {0.5, std::nullopt, std::nullopt}, "fig_pat_compare", true);
  if (id == "offset-heatmap") return figures::offset_heatmap(params);
  if (id == "power-validate") return figures::power_validate(params, args, cfg);
  if (id == "phi-sweep") return figures::phi_sweep(params);
  if (id == "strategy-compare") return figures::strategy_compare(params);
  if (id == "energy-opt") {
    return optimize_output(params, args.density, {Strategy::baseline, Strategy::offset}, args.workers,
                           "fig_energy_opt");
  }
  if (id == "rl-heatmap") return figures::rl_heatmap(params);
  throw DomainError("unknown figure id '" + std::string(id) + "'");
}

}  // namespace uowc::app
