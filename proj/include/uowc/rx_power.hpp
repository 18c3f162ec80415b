#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "uowc/channel.hpp"
#include "uowc/config.hpp"
#include "uowc/errors.hpp"
#include "uowc/geometry.hpp"
#include "uowc/numerics.hpp"

namespace uowc {

enum class PowerVariant { random_orientation, main_lobe, offset, pat };

inline std::string_view to_string(PowerVariant v) {
  switch (v) {
    case PowerVariant::random_orientation: return "random_orientation";
    case PowerVariant::main_lobe: return "main_lobe";
    case PowerVariant::offset: return "offset";
    case PowerVariant::pat: return "pat";
  }
  return "unknown";
}

struct PowerResult {
  double value;  // W
  PowerVariant variant;
  double link_length;                    // m
  std::optional<double> offset_angle;    // rad, main_lobe / offset
  std::optional<double> pointing_error;  // rad, pat only
};

/// Tolerance on the delta + phi_half <= pi/2 validity boundary, so that
/// boundary inputs given in degrees are not rejected by rounding.
inline constexpr double offset_domain_slack = 1e-12;

/// cos^{m+1}(delta) - cos^{m+1}(delta + phi_half): the angular weight of the
/// offset-pointing closed form (equal to (m+1) int_delta^{delta+phi} cos^m u sin u du).
inline double offset_factor(double m, double phi_half, double delta) {
  if (!(delta >= 0.0)) throw DomainError("offset angle must be >= 0");
  if (delta + phi_half > half_pi + offset_domain_slack) {
    throw DomainError("offset angle outside validity domain delta + phi_half <= pi/2");
  }
  const double upper = std::max(0.0, std::cos(std::min(delta + phi_half, half_pi)));
  return std::pow(std::cos(delta), m + 1.0) - std::pow(upper, m + 1.0);
}

namespace detail {
inline void check_link_length(double L) {
  if (!(L > 0.0) || !std::isfinite(L)) throw DomainError("link length must be finite and > 0");
}
}  // namespace detail

/// Average received power for a receiver uniformly random in position and
/// orientation over the hemisphere (large-distance limit):
///   P = r P_Tx r_circle^2 / (4 L^2) e^{-cL}.
inline PowerResult power_random_orientation(const SystemParams& params, double L) {
  detail::check_link_length(L);
  const double r = params.aperture_radius();
  const double value =
      params->responsivity_factor * params->tx_power * r * r / (4.0 * L * L) * path_loss(params->extinction, L);
  return {value, PowerVariant::random_orientation, L, std::nullopt, std::nullopt};
}

/// Random-orientation power restricted to the main lobe: factor 1 - cos^{m+1}(phi_half).
inline PowerResult power_main_lobe(const SystemParams& params, double L) {
  const double m = lambertian_order(params->phi_half);
  PowerResult out = power_random_orientation(params, L);
  out.value *= 1.0 - std::pow(std::cos(params->phi_half), m + 1.0);
  out.variant = PowerVariant::main_lobe;
  out.offset_angle = 0.0;
  return out;
}

/// Main-lobe power with a static receiver offset delta; valid for
/// delta + phi_half <= pi/2 only.
inline PowerResult power_offset(const SystemParams& params, double L, double delta) {
  const double m = lambertian_order(params->phi_half);
  const double factor = offset_factor(m, params->phi_half, delta);
  PowerResult out = power_random_orientation(params, L);
  out.value *= factor;
  out.variant = PowerVariant::offset;
  out.offset_angle = delta;
  return out;
}

/// Root of sin(d) cos^m(d) - sin(d + phi) cos^m(d + phi) on (0, pi/2 - phi):
/// the stationary point (maximiser) of the offset factor.
inline double optimal_offset_exact(double phi_half, double x_tol = 1e-13) {
  const double m = lambertian_order(phi_half);
  auto g = [&](double d) {
    const double u = d + phi_half;
    const double cu = std::max(0.0, std::cos(u));
    return std::sin(d) * std::pow(std::cos(d), m) - std::sin(u) * std::pow(cu, m);
  };
  return numerics::bisect(g, 0.0, half_pi - phi_half, x_tol);
}

/// Empirical fit pi/12 + (cos(2 phi_half + 4 pi / 3) - 1) / (2 pi).
inline double optimal_offset_approx(double phi_half) {
  if (!(phi_half > 0.0 && phi_half < half_pi)) throw DomainError("phi_half must lie in (0, pi/2)");
  return pi / 12.0 + (std::cos(2.0 * phi_half + 4.0 * pi / 3.0) - 1.0) / (2.0 * pi);
}

/// Ideal tracking benchmark with residual pointing error epsilon:
///   P = r P_Tx (m+1) A_r / (2 pi L^2) e^{-cL} cos^m(epsilon).
inline PowerResult pat_power(const SystemParams& params, double L, double epsilon) {
  detail::check_link_length(L);
  if (!(epsilon >= 0.0 && epsilon <= half_pi)) throw DomainError("pointing error must lie in [0, pi/2]");
  const double m = lambertian_order(params->phi_half);
  const double c = epsilon >= half_pi ? 0.0 : std::cos(epsilon);
  const double value = params->responsivity_factor * params->tx_power * (m + 1.0) * params.aperture_area() /
                       (2.0 * pi * L * L) * path_loss(params->extinction, L) * std::pow(c, m);
  return {value, PowerVariant::pat, L, std::nullopt, epsilon};
}

/// Pointing error at which the PAT benchmark falls to the offset-strategy
/// power (absolute powers, same link).
inline double pat_crossover(const SystemParams& params, double L, double strategy_delta, double x_tol = 1e-13) {
  const double offset = power_offset(params, L, strategy_delta).value;
  const double axial = pat_power(params, L, 0.0).value;
  if (!(offset < axial)) throw NoCrossing("offset-strategy power is not below the axial PAT power");
  return numerics::bisect([&](double eps) { return pat_power(params, L, eps).value - offset; }, 0.0, half_pi,
                          x_tol);
}

// ---------------------------------------------------------------------------
// Heat-map grids

struct Axis {
  double start = 0.0;
  double stop = 0.0;
  std::size_t count = 0;
  bool log_spaced = false;

  std::vector<double> values() const { return numerics::linspace(start, stop, count, log_spaced); }
};

/// Rows: phi_half; columns: delta. Cells with delta + phi_half > pi/2 are invalid.
struct OffsetGridSpec {
  Axis phi_half;
  Axis delta;
  double link_length = 20.0;
  bool normalize = true;
};

/// Rows: slab depth R; columns: Lambda. Link length per cell is the mean
/// nearest-neighbour distance.
struct DensityGridSpec {
  Axis slab_depth;
  Axis lambda_2d;
  double delta = 0.0;
  bool normalize = false;
};

struct GridCell {
  double row_value;
  double col_value;
  bool valid;
  PowerResult power;
  double normalized;  // value / grid max (== value when not normalizing)
};

struct PowerGrid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  double max_value = 0.0;
  std::vector<GridCell> cells;  // row-major

  const GridCell& at(std::size_t r, std::size_t c) const { return cells.at(r * cols + c); }
};

namespace detail {
inline void finish_grid(PowerGrid& grid, bool normalize) {
  double max_value = 0.0;
  for (const auto& c : grid.cells) {
    if (c.valid) max_value = std::max(max_value, c.power.value);
  }
  grid.max_value = max_value;
  for (auto& c : grid.cells) {
    if (!c.valid) {
      c.normalized = std::numeric_limits<double>::quiet_NaN();
    } else {
      c.normalized = normalize && max_value > 0.0 ? c.power.value / max_value : c.power.value;
    }
  }
}
}  // namespace detail

inline PowerGrid power_grid(const SystemParams& params, const OffsetGridSpec& spec) {
  const auto phis = spec.phi_half.values();
  const auto deltas = spec.delta.values();
  if (phis.empty() || deltas.empty()) throw DomainError("power_grid: empty axis");
  PowerGrid grid;
  grid.rows = phis.size();
  grid.cols = deltas.size();
  grid.cells.reserve(grid.rows * grid.cols);
  for (double phi : phis) {
    const SystemParams row_params = params.with([&](ParamValues& v) { v.phi_half = phi; });
    for (double delta : deltas) {
      GridCell cell{phi, delta, false, {0.0, PowerVariant::offset, spec.link_length, delta, std::nullopt}, 0.0};
      if (delta >= 0.0 && delta + phi <= half_pi + offset_domain_slack) {
        cell.power = power_offset(row_params, spec.link_length, delta);
        cell.valid = true;
      } else {
        cell.power.value = std::numeric_limits<double>::quiet_NaN();
      }
      grid.cells.push_back(cell);
    }
  }
  detail::finish_grid(grid, spec.normalize);
  return grid;
}

inline PowerGrid power_grid(const SystemParams& params, const DensityGridSpec& spec) {
  const auto depths = spec.slab_depth.values();
  const auto lambdas = spec.lambda_2d.values();
  if (depths.empty() || lambdas.empty()) throw DomainError("power_grid: empty axis");
  PowerGrid grid;
  grid.rows = depths.size();
  grid.cols = lambdas.size();
  grid.cells.reserve(grid.rows * grid.cols);
  for (double R : depths) {
    for (double lambda : lambdas) {
      const double L = NNDistribution(lambda, R).mean_distance();
      grid.cells.push_back({R, lambda, true, power_offset(params, L, spec.delta), 0.0});
    }
  }
  detail::finish_grid(grid, spec.normalize);
  return grid;
}

}  // namespace uowc
