#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace catlink {

/// Ground-level turbulence strength A (m^{-2/3}), wind speed v (m/s),
/// wavelength (m) and propagation distance / satellite altitude L (m).
struct AtmosphereParams {
  double ground_cn2 = 9.6e-14;
  double wind_speed = 21.0;
  double wavelength = 780e-9;
  double distance = 500e3;

  [[nodiscard]] double wavenumber() const { return 2.0 * std::numbers::pi / wavelength; }

  void validate() const {
    if (!(ground_cn2 > 0.0) || !(wind_speed > 0.0) || !(wavelength > 0.0) || !(distance > 0.0)) {
      throw std::domain_error("AtmosphereParams: all parameters must be positive");
    }
  }
};

/// Refraction-index structure constant C_n^2(h) at altitude h (m).
inline double cn2_profile(double h, const AtmosphereParams& atm) {
  if (!(h >= 0.0)) throw std::domain_error("cn2_profile: altitude must be >= 0");
  const double wind = atm.wind_speed / 27.0;
  return 0.00594 * wind * wind * std::pow(h * 1e-5, 10.0) * std::exp(-h / 1000.0) +
         2.7e-16 * std::exp(-h / 1500.0) + atm.ground_cn2 * std::exp(-h / 100.0);
}

/// sigma_R^2 = 1.23 C_n^2 k^{7/6} L^{11/6}.
inline double rytov_variance(double cn2, double wavenumber, double distance) {
  if (!(cn2 >= 0.0) || !(wavenumber >= 0.0) || !(distance >= 0.0)) {
    throw std::domain_error("rytov_variance: inputs must be nonnegative");
  }
  return 1.23 * cn2 * std::pow(wavenumber, 7.0 / 6.0) * std::pow(distance, 11.0 / 6.0);
}

/// Fresnel parameter Omega = pi W0^2 / (L lambda).
inline double fresnel_parameter(double w0, double wavelength, double distance) {
  return std::numbers::pi * w0 * w0 / (distance * wavelength);
}

/// Beam-wander standard deviation sigma = W0 sqrt(0.33 sigma_R^2 Omega^{-7/6}).
inline double beam_wander_sigma(double w0, double rytov_var, double wavelength, double distance) {
  if (!(w0 > 0.0) || !(rytov_var >= 0.0) || !(wavelength > 0.0) || !(distance > 0.0)) {
    throw std::domain_error("beam_wander_sigma: invalid inputs");
  }
  const double omega = fresnel_parameter(w0, wavelength, distance);
  return w0 * std::sqrt(0.33 * rytov_var * std::pow(omega, -7.0 / 6.0));
}

}  // namespace catlink
