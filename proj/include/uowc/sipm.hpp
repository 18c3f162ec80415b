#pragma once

#include <cmath>

#include "uowc/config.hpp"
#include "uowc/errors.hpp"
#include "uowc/numerics.hpp"

namespace uowc {

struct NoiseBreakdown {
  double sigma_q2;       // signal shot noise, A^2
  double sigma_d2;       // dark-current shot noise, A^2
  double sigma_solar2;   // solar background shot noise, A^2
  double sigma_th2;      // Johnson noise, A^2
  double sigma_total2;   // sum of the four
  double signal_current; // gained photocurrent, A
  double solar_power;    // captured background power, W
};

/// Pre-gain responsivity eta lambda q / (h c), A/W.
inline double responsivity(const SystemParams& params) {
  using namespace constants;
  return params->pde * params->wavelength * elementary_charge / (planck * speed_of_light);
}

/// Gained SiPM signal current for received optical power p_rx.
inline double photocurrent(double p_rx, const SystemParams& params) {
  if (!(p_rx >= 0.0)) throw DomainError("photocurrent: received power must be >= 0");
  return responsivity(params) * params->sipm_gain * p_rx;
}

/// F = 1 / (1 + ln(1 - P_ct)).
inline double excess_noise_factor(double p_ct) {
  if (!(p_ct >= 0.0 && p_ct < crosstalk_limit)) {
    throw DomainError("excess_noise_factor: crosstalk probability must lie in [0, 1 - 1/e)");
  }
  return 1.0 / (1.0 + std::log1p(-p_ct));
}

/// Spectral multiplier applied to the solar term for the configured mode.
inline double solar_spectral_factor(const SystemParams& params) {
  if (params->solar_spectral_fraction_mode == SolarSpectralMode::raw_nm_multiplier) return params->filter_window_nm;
  return params->filter_window_nm / params->solar_ref_band_nm;
}

/// Background power captured at depth l_deep:
///   A_r phi_FOV^2 L_f zeta_r E_sun(0) e^{-eps l_deep} T_s f_dlambda.
inline double solar_power(const SystemParams& params, double l_deep) {
  if (!(l_deep >= 0.0)) throw DomainError("solar_power: depth must be >= 0");
  const double fov = params->fov_semi_angle;
  return params.aperture_area() * fov * fov * params->solar_direction_factor * params->solar_reflectance *
         params->solar_surface_irradiance * std::exp(-params->solar_attenuation * l_deep) *
         params->filter_transmittance * solar_spectral_factor(params);
}

/// The four noise variances. G^2 and F multiply every shot-type term; the
/// currents in brackets are pre-gain.
inline NoiseBreakdown noise_variances(double p_rx, const SystemParams& params, double l_deep) {
  if (!(p_rx >= 0.0)) throw DomainError("noise_variances: received power must be >= 0");
  const double q = constants::elementary_charge;
  const double G = params->sipm_gain;
  const double shot = 2.0 * q * params->bandwidth * G * G * excess_noise_factor(params->crosstalk_prob);
  const double resp = responsivity(params);
  const double p_sun = solar_power(params, l_deep);

  NoiseBreakdown n{};
  n.sigma_q2 = shot * resp * p_rx;
  n.sigma_d2 = shot * params->dark_current;
  n.sigma_solar2 = shot * resp * p_sun;
  n.sigma_th2 = 4.0 * constants::boltzmann * params->temperature * params->bandwidth / params->load_resistance;
  n.sigma_total2 = n.sigma_q2 + n.sigma_d2 + n.sigma_solar2 + n.sigma_th2;
  n.signal_current = resp * G * p_rx;
  n.solar_power = p_sun;
  return n;
}

inline double snr(const NoiseBreakdown& n) { return n.signal_current * n.signal_current / n.sigma_total2; }

inline double snr(double p_rx, const SystemParams& params, double l_deep) {
  return snr(noise_variances(p_rx, params, l_deep));
}

/// NRZ-OOK: BER = erfc(sqrt(SNR / 2)) / 2.
inline double ber_ook(double snr_value) {
  if (!(snr_value >= 0.0)) throw DomainError("ber_ook: SNR must be >= 0");
  return 0.5 * std::erfc(std::sqrt(snr_value / 2.0));
}

/// SNR at which ber_ook reaches `ber`, for ber in (0, 0.5).
inline double snr_for_ber(double ber) {
  if (!(ber > 0.0 && ber < 0.5)) throw DomainError("snr_for_ber: BER must lie in (0, 0.5)");
  // erfc(x) = 2 ber; erfc is decreasing, bracket x in [0, 40].
  const double x = numerics::bisect([&](double t) { return 0.5 * std::erfc(t) - ber; }, 0.0, 40.0, 1e-15);
  return 2.0 * x * x;
}

}  // namespace uowc
