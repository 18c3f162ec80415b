#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <utility>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "uowc/config.hpp"
#include "uowc/errors.hpp"

namespace uowc::app {

/// Any problem turning user input into a SystemParams (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// How one external key maps onto ParamValues. Angle keys carry a "_deg"
/// suffix and are converted to radians on the way in.
struct FieldSpec {
  std::string_view key;
  std::string_view field;  // name reported by validation
  bool degrees;
  double ParamValues::*member;
};

inline const std::vector<FieldSpec>& field_specs() {
  static const std::vector<FieldSpec> specs = {
      {"lambda_2d", "lambda_2d", false, &ParamValues::lambda_2d},
      {"slab_depth", "slab_depth", false, &ParamValues::slab_depth},
      {"phi_half_deg", "phi_half", true, &ParamValues::phi_half},
      {"tx_power", "tx_power", false, &ParamValues::tx_power},
      {"extinction", "extinction", false, &ParamValues::extinction},
      {"wavelength", "wavelength", false, &ParamValues::wavelength},
      {"aperture_diameter", "aperture_diameter", false, &ParamValues::aperture_diameter},
      {"responsivity_factor", "responsivity_factor", false, &ParamValues::responsivity_factor},
      {"filter_transmittance", "filter_transmittance", false, &ParamValues::filter_transmittance},
      {"concentrator_index", "concentrator_index", false, &ParamValues::concentrator_index},
      {"fov_semi_angle_deg", "fov_semi_angle", true, &ParamValues::fov_semi_angle},
      {"pde", "pde", false, &ParamValues::pde},
      {"sipm_gain", "sipm_gain", false, &ParamValues::sipm_gain},
      {"crosstalk_prob", "crosstalk_prob", false, &ParamValues::crosstalk_prob},
      {"dark_current", "dark_current", false, &ParamValues::dark_current},
      {"bandwidth", "bandwidth", false, &ParamValues::bandwidth},
      {"load_resistance", "load_resistance", false, &ParamValues::load_resistance},
      {"temperature", "temperature", false, &ParamValues::temperature},
      {"solar_surface_irradiance", "solar_surface_irradiance", false, &ParamValues::solar_surface_irradiance},
      {"solar_attenuation", "solar_attenuation", false, &ParamValues::solar_attenuation},
      {"solar_direction_factor", "solar_direction_factor", false, &ParamValues::solar_direction_factor},
      {"solar_reflectance", "solar_reflectance", false, &ParamValues::solar_reflectance},
      {"filter_window_nm", "filter_window_nm", false, &ParamValues::filter_window_nm},
      {"solar_ref_band_nm", "solar_ref_band_nm", false, &ParamValues::solar_ref_band_nm},
      {"energy_total", "energy_total", false, &ParamValues::energy_total},
      {"deploy_radius", "deploy_radius", false, &ParamValues::deploy_radius},
      {"ber_threshold", "ber_threshold", false, &ParamValues::ber_threshold},
      {"ptx_floor", "ptx_floor", false, &ParamValues::ptx_floor},
      {"ptx_max", "ptx_max", false, &ParamValues::ptx_max},
  };
  return specs;
}

inline constexpr std::string_view solar_mode_key = "solar_spectral_fraction_mode";

inline SolarSpectralMode parse_solar_mode(std::string_view s) {
  if (s == "raw_nm_multiplier") return SolarSpectralMode::raw_nm_multiplier;
  if (s == "band_fraction") return SolarSpectralMode::band_fraction;
  throw ConfigError(std::string(solar_mode_key) + ": unknown mode '" + std::string(s) +
                    "' (expected raw_nm_multiplier or band_fraction)");
}

/// Applies one key to `v`. Unknown keys are rejected.
inline void apply_key(ParamValues& v, std::string_view key, const nlohmann::json& value) {
  if (key == solar_mode_key) {
    if (!value.is_string()) throw ConfigError(std::string(key) + ": expected a string");
    v.solar_spectral_fraction_mode = parse_solar_mode(value.get<std::string>());
    return;
  }
  for (const auto& spec : field_specs()) {
    if (spec.key != key) continue;
    if (!value.is_number()) throw ConfigError(std::string(key) + ": expected a number");
    const double x = value.get<double>();
    v.*spec.member = spec.degrees ? deg_to_rad(x) : x;
    return;
  }
  throw ConfigError("unknown configuration key '" + std::string(key) + "'");
}

/// Parses "key=value" into the key and a JSON value (a number, or a string
/// for the spectral mode).
inline std::pair<std::string, nlohmann::json> parse_assignment(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("expected key=value, got '" + std::string(assignment) + "'");
  }
  std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  if (key == solar_mode_key) return {std::move(key), nlohmann::json(text)};
  double x = 0.0;
  try {
    std::size_t used = 0;
    x = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw ConfigError(key + ": '" + text + "' is not a number");
  }
  return {std::move(key), nlohmann::json(x)};
}

/// The record in external form: the same keys the loader accepts.
inline nlohmann::ordered_json to_config_json(const ParamValues& v) {
  nlohmann::ordered_json j;
  for (const auto& spec : field_specs()) {
    const double x = v.*spec.member;
    j[std::string(spec.key)] = spec.degrees ? rad_to_deg(x) : x;
  }
  j[std::string(solar_mode_key)] = std::string(to_string(v.solar_spectral_fraction_mode));
  return j;
}

/// Built-in defaults in external form. Angles are the literal degree values,
/// so converting this document reproduces ParamValues{} exactly.
inline nlohmann::ordered_json default_config_json() {
  auto j = to_config_json(ParamValues{});
  j["phi_half_deg"] = default_phi_half_deg;
  j["fov_semi_angle_deg"] = default_fov_semi_angle_deg;
  return j;
}

/// Sets one key of an external document after type-checking it.
inline void overlay_key(nlohmann::ordered_json& doc, std::string_view key, const nlohmann::json& value) {
  ParamValues scratch;
  apply_key(scratch, key, value);
  doc[std::string(key)] = value;
}

inline void overlay(nlohmann::ordered_json& doc, const nlohmann::json& src) {
  if (!src.is_object()) throw ConfigError("configuration must be a JSON object");
  for (const auto& [key, value] : src.items()) overlay_key(doc, key, value);
}

inline ParamValues from_config_json(const nlohmann::ordered_json& doc) {
  ParamValues v;
  for (const auto& [key, value] : doc.items()) apply_key(v, key, value);
  return v;
}

namespace detail {
inline std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}
}  // namespace detail

inline nlohmann::json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // e.byte is 1-based and points one past the offending character
    const std::size_t at = e.byte > 0 ? e.byte - 1 : 0;
    throw ConfigError(origin + ": JSON parse error at " + detail::line_col(text, at) + ": " + e.what());
  }
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

/// Turns validation failures into a ConfigError listing every field.
inline SystemParams validate_or_throw(const ParamValues& v) {
  try {
    return validate_params(v);
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
}

using Overrides = std::vector<std::pair<std::string, nlohmann::json>>;

struct ResolvedConfig {
  nlohmann::ordered_json document;  // effective external form, echoed into manifests
  SystemParams params;
};

/// Defaults, then the optional file, then overrides in order, then validation.
inline ResolvedConfig resolve_config(const std::optional<std::filesystem::path>& path, const Overrides& overrides = {}) {
  auto doc = default_config_json();
  if (path) overlay(doc, parse_json_text(read_file(*path), path->string()));
  for (const auto& [key, value] : overrides) overlay_key(doc, key, value);
  SystemParams params = validate_or_throw(from_config_json(doc));
  return {std::move(doc), std::move(params)};
}

inline SystemParams load_config(const std::filesystem::path& path, const Overrides& overrides = {}) {
  return resolve_config(path, overrides).params;
}

}  // namespace uowc::app
