#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "uowc/errors.hpp"

namespace uowc {

namespace constants {
// CODATA 2018 exact values.
inline constexpr double elementary_charge = 1.602176634e-19;  // C
inline constexpr double planck = 6.62607015e-34;              // J s
inline constexpr double speed_of_light = 299792458.0;         // m/s
inline constexpr double boltzmann = 1.380649e-23;             // J/K
}  // namespace constants

inline constexpr double pi = std::numbers::pi;
inline constexpr double half_pi = std::numbers::pi / 2.0;

constexpr double deg_to_rad(double deg) noexcept { return deg * (pi / 180.0); }
constexpr double rad_to_deg(double rad) noexcept { return rad * (180.0 / pi); }

/// Upper bound on the crosstalk probability: 1 + ln(1 - p) must stay positive.
inline const double crosstalk_limit = 1.0 - std::exp(-1.0);

/// How the filter window enters the solar background power.
enum class SolarSpectralMode {
  raw_nm_multiplier,  ///< multiply by the window width in nm, literally
  band_fraction,      ///< multiply by window / reference band (dimensionless)
};

inline std::string_view to_string(SolarSpectralMode mode) {
  return mode == SolarSpectralMode::raw_nm_multiplier ? "raw_nm_multiplier" : "band_fraction";
}

inline constexpr double default_phi_half_deg = 60.0;
inline constexpr double default_fov_semi_angle_deg = 120.0;

/// Raw, unvalidated parameter values. Defaults are the simulation table values
/// plus documented choices for quantities the table does not list. Angles are
/// radians here; the JSON/CLI boundary speaks degrees.
struct ParamValues {
  double lambda_2d = 1e-3;                // nodes / m^2
  double slab_depth = 50.0;               // m
  double phi_half = deg_to_rad(default_phi_half_deg);     // rad
  double tx_power = 8.0;                  // W
  double extinction = 0.151;              // 1/m
  double wavelength = 450e-9;             // m
  double aperture_diameter = 0.30;        // m
  double responsivity_factor = 1.0;
  double filter_transmittance = 1.0;
  double concentrator_index = 1.5;
  double fov_semi_angle = deg_to_rad(default_fov_semi_angle_deg);  // rad
  double pde = 0.31;
  double sipm_gain = 1e6;
  double crosstalk_prob = 0.08;
  double dark_current = 154e-9;           // A, pre-gain
  double bandwidth = 1e6;                 // Hz
  double load_resistance = 50.0;          // ohm
  double temperature = 290.0;             // K
  double solar_surface_irradiance = 1000.0;  // W/m^2
  double solar_attenuation = 0.2;         // 1/m
  double solar_direction_factor = 4.0;
  double solar_reflectance = 1.25;
  double filter_window_nm = 50.0;
  SolarSpectralMode solar_spectral_fraction_mode = SolarSpectralMode::raw_nm_multiplier;
  double solar_ref_band_nm = 1000.0;
  double energy_total = 1e6;              // J
  double deploy_radius = 1000.0;          // m
  double ber_threshold = 1e-6;
  double ptx_floor = 0.01;                // W
  double ptx_max = 8.0;                   // W

  bool operator==(const ParamValues&) const = default;
};

class SystemParams;
SystemParams validate_params(const ParamValues& raw);

/// Validated, immutable parameter record. Only validate_params constructs one;
/// modified copies go through with(), which re-validates.
class SystemParams {
 public:
  const ParamValues& values() const noexcept { return values_; }
  const ParamValues* operator->() const noexcept { return &values_; }

  /// Copy with the edits applied, validated again.
  SystemParams with(const std::function<void(ParamValues&)>& edit) const {
    ParamValues copy = values_;
    edit(copy);
    return validate_params(copy);
  }

  double aperture_radius() const noexcept { return values_.aperture_diameter / 2.0; }
  double aperture_area() const noexcept {
    return pi * values_.aperture_diameter * values_.aperture_diameter / 4.0;
  }
  double deploy_area() const noexcept { return pi * values_.deploy_radius * values_.deploy_radius; }

  bool operator==(const SystemParams&) const = default;

 private:
  explicit SystemParams(const ParamValues& v) : values_(v) {}
  friend SystemParams validate_params(const ParamValues& raw);

  ParamValues values_;
};

namespace detail {

class Checker {
 public:
  void positive(std::string_view field, double v) {
    if (!std::isfinite(v) || !(v > 0.0)) add(field, "must be finite and > 0");
  }
  void non_negative(std::string_view field, double v) {
    if (!std::isfinite(v) || v < 0.0) add(field, "must be finite and >= 0");
  }
  void open_interval(std::string_view field, double v, double lo, double hi, std::string_view text) {
    if (!std::isfinite(v) || !(v > lo && v < hi)) add(field, std::string("must lie in ") + std::string(text));
  }
  void add(std::string_view field, std::string reason) {
    violations.push_back({std::string(field), std::move(reason)});
  }
  std::vector<Violation> violations;
};

}  // namespace detail

/// Checks every bound and reports all violations together.
inline SystemParams validate_params(const ParamValues& raw) {
  detail::Checker c;
  c.positive("lambda_2d", raw.lambda_2d);
  c.positive("slab_depth", raw.slab_depth);
  c.open_interval("phi_half", raw.phi_half, 0.0, half_pi, "(0, 90) deg");
  c.positive("tx_power", raw.tx_power);
  c.non_negative("extinction", raw.extinction);
  c.positive("wavelength", raw.wavelength);
  c.positive("aperture_diameter", raw.aperture_diameter);
  c.positive("responsivity_factor", raw.responsivity_factor);
  if (!std::isfinite(raw.filter_transmittance) ||
      !(raw.filter_transmittance > 0.0 && raw.filter_transmittance <= 1.0)) {
    c.add("filter_transmittance", "must lie in (0, 1]");
  }
  c.positive("concentrator_index", raw.concentrator_index);
  c.open_interval("fov_semi_angle", raw.fov_semi_angle, 0.0, pi, "(0, 180) deg");
  if (!std::isfinite(raw.pde) || !(raw.pde > 0.0 && raw.pde <= 1.0)) c.add("pde", "must lie in (0, 1]");
  c.positive("sipm_gain", raw.sipm_gain);
  if (!std::isfinite(raw.crosstalk_prob) || raw.crosstalk_prob < 0.0 ||
      !(raw.crosstalk_prob < crosstalk_limit)) {
    c.add("crosstalk_prob", "must lie in [0, 1 - 1/e)");
  }
  c.non_negative("dark_current", raw.dark_current);
  c.positive("bandwidth", raw.bandwidth);
  c.positive("load_resistance", raw.load_resistance);
  c.positive("temperature", raw.temperature);
  c.non_negative("solar_surface_irradiance", raw.solar_surface_irradiance);
  c.non_negative("solar_attenuation", raw.solar_attenuation);
  c.non_negative("solar_direction_factor", raw.solar_direction_factor);
  c.non_negative("solar_reflectance", raw.solar_reflectance);
  c.positive("filter_window_nm", raw.filter_window_nm);
  c.positive("solar_ref_band_nm", raw.solar_ref_band_nm);
  c.positive("energy_total", raw.energy_total);
  c.positive("deploy_radius", raw.deploy_radius);
  c.open_interval("ber_threshold", raw.ber_threshold, 0.0, 0.5, "(0, 0.5)");
  c.positive("ptx_floor", raw.ptx_floor);
  c.positive("ptx_max", raw.ptx_max);
  if (std::isfinite(raw.ptx_floor) && std::isfinite(raw.ptx_max) && !(raw.ptx_floor < raw.ptx_max)) {
    c.add("ptx_floor", "must be < ptx_max");
  }
  if (!c.violations.empty()) throw ValidationError(std::move(c.violations));
  return SystemParams(raw);
}

inline SystemParams validate_params(const SystemParams& params) { return validate_params(params.values()); }

/// The simulation-table configuration.
inline SystemParams default_params() { return validate_params(ParamValues{}); }

struct LevelPreset {
  int level_id;
  double slab_depth;  // m
  std::string_view label;
};

/// Presets pin R to the upper bound of each operating range.
inline LevelPreset level_preset(int level_id) {
  switch (level_id) {
    case 1: return {1, 50.0, "short-range, high-density (0-50 m)"};
    case 2: return {2, 500.0, "medium-range (50-500 m)"};
    case 3: return {3, 6000.0, "long-range / deep-sea (500-6000 m)"};
    default: throw DomainError("unknown level id " + std::to_string(level_id) + " (expected 1, 2 or 3)");
  }
}

inline SystemParams apply_level(const SystemParams& params, const LevelPreset& preset) {
  return params.with([&](ParamValues& v) { v.slab_depth = preset.slab_depth; });
}

inline SystemParams apply_level(const SystemParams& params, int level_id) {
  return apply_level(params, level_preset(level_id));
}

}  // namespace uowc
