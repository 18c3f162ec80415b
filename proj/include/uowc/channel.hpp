#pragma once

#include <cmath>

#include "uowc/config.hpp"
#include "uowc/errors.hpp"

namespace uowc {

/// Generalised Lambertian order from the half-power semi-angle, so that
/// cos(phi_half)^m = 1/2.
inline double lambertian_order(double phi_half) {
  if (!(phi_half > 0.0 && phi_half < half_pi)) throw DomainError("lambertian_order: phi_half must lie in (0, pi/2)");
  return -std::log(2.0) / std::log(std::cos(phi_half));
}

/// Beer-Lambert extinction e^{-cL}.
inline double path_loss(double extinction, double length) {
  if (!(extinction >= 0.0)) throw DomainError("path_loss: extinction must be >= 0");
  if (!(length >= 0.0)) throw DomainError("path_loss: length must be >= 0");
  return std::exp(-extinction * length);
}

/// Ideal non-imaging concentrator; the FoV boundary itself is accepted.
inline double concentrator_gain(double psi, double refractive_index, double fov) {
  if (psi > fov) return 0.0;
  const double s = std::sin(fov);
  return refractive_index * refractive_index / (s * s);
}

struct RayGeometry {
  double irradiance_angle;  // theta, rad
  double incidence_angle;   // psi, rad
  double link_length;       // m
};

/// LOS DC gain H = (m+1)/(2 pi L^2) cos^m(theta) cos(psi) T_s g(psi) e^{-cL}.
/// Receivers behind the emitter (cos theta <= 0) or outside the FoV get 0.
inline double los_channel_gain(const RayGeometry& geom, const SystemParams& params) {
  if (!(geom.link_length > 0.0)) throw DomainError("los_channel_gain: link length must be > 0");
  if (!(geom.incidence_angle >= 0.0)) throw DomainError("los_channel_gain: incidence angle must be >= 0");
  const double cos_theta = std::cos(geom.irradiance_angle);
  if (std::abs(geom.irradiance_angle) >= half_pi || cos_theta <= 0.0) return 0.0;
  const double g = concentrator_gain(geom.incidence_angle, params->concentrator_index, params->fov_semi_angle);
  if (g == 0.0) return 0.0;
  const double m = lambertian_order(params->phi_half);
  const double L = geom.link_length;
  return (m + 1.0) / (2.0 * pi * L * L) * std::pow(cos_theta, m) * std::cos(geom.incidence_angle) *
         params->filter_transmittance * g * path_loss(params->extinction, L);
}

}  // namespace uowc
