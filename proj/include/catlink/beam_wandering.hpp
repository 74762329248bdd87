#pragma once

// Circular Gaussian beam whose centroid wanders over the receiver aperture.
//
// Transmissivity at displacement d (all lengths relative to the aperture
// radius a, W_a = W/a):
//   T(d) = T0 exp(-(d_a / R)^lambda),  T0 = 1 - exp(-2/W_a^2),
//   lambda = 8/W_a^2 e^{-u} I1(u) / (1 - e^{-u} I0(u)) / ln(2 T0 / (1 - e^{-u} I0(u))),
//   R = [ln(2 T0 / (1 - e^{-u} I0(u)))]^{-1/lambda},  u = 4/W_a^2.
// With a Rayleigh-distributed displacement the transmission coefficient
// t = sqrt(T) follows a log-negative Weibull law.

#include <cmath>
#include <stdexcept>

#include "catlink/specfun.hpp"

namespace catlink {

/// Transmitter waist W0, receiver beam width W and aperture radius a (metres).
struct BeamGeometry {
  double w0 = 0.12;
  double width = 1.0;
  double aperture = 1.0;

  [[nodiscard]] double width_ratio() const { return width / aperture; }

  void validate() const {
    if (!(w0 > 0.0) || !(width > 0.0) || !(aperture > 0.0)) {
      throw std::domain_error("BeamGeometry: lengths must be positive");
    }
  }
};

/// Shape parameters of the circular-beam transmissivity law.
struct BeamWanderingLaw {
  double max_transmissivity;  // T0, the cut-off
  double shape;               // lambda
  double scale;               // R, in units of the aperture radius

  static BeamWanderingLaw for_width_ratio(double w_a) {
    if (!(w_a > 0.0)) throw std::domain_error("BeamWanderingLaw: W/a must be positive");
    const double u = 4.0 / (w_a * w_a);
    const double t0 = -std::expm1(-2.0 / (w_a * w_a));
    const double denom = 1.0 - specfun::bessel_i0_scaled(u);
    const double log_term = std::log(2.0 * t0 / denom);
    const double shape = 2.0 * u * specfun::bessel_i1_scaled(u) / denom / log_term;
    return {t0, shape, std::pow(log_term, -1.0 / shape)};
  }

  static BeamWanderingLaw for_geometry(const BeamGeometry& g) {
    g.validate();
    return for_width_ratio(g.width_ratio());
  }

  /// T at relative displacement d/a.
  [[nodiscard]] double transmissivity(double d_rel) const {
    return max_transmissivity * std::exp(-std::pow(d_rel / scale, shape));
  }

  [[nodiscard]] double max_coefficient() const { return std::sqrt(max_transmissivity); }

  /// Density of the transmission coefficient t for centroid deviation sigma_a = sigma/a.
  [[nodiscard]] double coefficient_pdf(double t, double sigma_rel) const {
    const double t0 = max_coefficient();
    if (!(t > 0.0) || t > t0) return 0.0;
    const double s = 2.0 * std::log(t0 / t);
    if (s <= 0.0) return 0.0;  // singular cusp at t0 when lambda > 2; measure zero
    const double r2 = scale * scale;
    const double sig2 = sigma_rel * sigma_rel;
    return 2.0 * r2 / (sig2 * shape * t) * std::pow(s, 2.0 / shape - 1.0) *
           std::exp(-r2 / (2.0 * sig2) * std::pow(s, 2.0 / shape));
  }

  /// P(t' <= t), closed form.
  [[nodiscard]] double coefficient_cdf(double t, double sigma_rel) const {
    const double t0 = max_coefficient();
    if (!(t > 0.0)) return 0.0;
    if (t >= t0) return 1.0;
    const double s = 2.0 * std::log(t0 / t);
    return std::exp(-scale * scale / (2.0 * sigma_rel * sigma_rel) * std::pow(s, 2.0 / shape));
  }

  /// Density of T = t^2: p_T(T) = p_t(sqrt T) / (2 sqrt T).
  [[nodiscard]] double transmissivity_pdf(double T, double sigma_rel) const {
    if (!(T > 0.0)) return 0.0;
    const double t = std::sqrt(T);
    return coefficient_pdf(t, sigma_rel) / (2.0 * t);
  }

  [[nodiscard]] double transmissivity_cdf(double T, double sigma_rel) const {
    if (!(T > 0.0)) return 0.0;
    return coefficient_cdf(std::sqrt(T), sigma_rel);
  }
};

/// Rayleigh density of the centroid displacement d for per-axis deviation sigma.
inline double rice_pdf(double d, double sigma) {
  if (!(sigma > 0.0)) throw std::domain_error("rice_pdf: sigma must be positive");
  if (d < 0.0) return 0.0;
  return d / (sigma * sigma) * std::exp(-d * d / (2.0 * sigma * sigma));
}

inline double bw_transmissivity(double d, const BeamGeometry& geometry) {
  if (!(d >= 0.0)) throw std::domain_error("bw_transmissivity: displacement must be >= 0");
  return BeamWanderingLaw::for_geometry(geometry).transmissivity(d / geometry.aperture);
}

inline double bw_pdf(double t, double sigma_rel, const BeamGeometry& geometry) {
  if (!(sigma_rel > 0.0)) throw std::domain_error("bw_pdf: sigma/a must be positive");
  return BeamWanderingLaw::for_geometry(geometry).coefficient_pdf(t, sigma_rel);
}

}  // namespace catlink
