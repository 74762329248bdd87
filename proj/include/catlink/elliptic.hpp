#pragma once

// Elliptic-beam transmissivity: the beam arrives displaced by (x, y), with
// semi-axes W1, W2 rotated by phi relative to the aperture frame.
//
//   W_eff^2(phi) = 4a^2 / W0( 4a^2/(W1 W2) exp[a^2/W1^2 (1 + 2cos^2 phi)
//                                              + a^2/W2^2 (1 + 2sin^2 phi)] )
//   T = T_E0 exp(-[(d/a) / R(2/W_eff)]^{lambda(2/W_eff)})
//
// where W0 is Lambert W and R, lambda are the scale and shape functions of a
// circular beam with inverse width xi. With xi = 2/W both reduce exactly to
// the beam-wandering law of beam_wandering.hpp.

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "catlink/specfun.hpp"

namespace catlink {

struct EllipticSample {
  double x = 0.0;    // centroid deviation, metres
  double y = 0.0;
  double w1 = 1.0;   // semi-axes, metres
  double w2 = 1.0;
  double phi = 0.0;  // rotation in [0, pi/2)
};

namespace detail {

// Shape/scale pair for inverse width xi, u = a^2 xi^2.
struct ShapeScale {
  double shape;
  double log_term;  // ln(2 (1 - e^{-u/2}) / (1 - e^{-u} I0(u)))

  [[nodiscard]] double scale() const { return std::pow(log_term, -1.0 / shape); }
};

inline ShapeScale shape_scale(double u) {
  if (!(u > 0.0)) throw std::domain_error("elliptic: inverse width must be nonzero");
  // D = 1 - e^{-u} I0(u) split as -expm1(-u) - e^{-u}(I0(u) - 1) to keep
  // accuracy for small u.
  double denom;
  if (u < 1.0) {
    const double q = 0.25 * u * u;
    double term = 1.0;
    double series = 0.0;
    for (int k = 1; k < 40; ++k) {
      term *= q / (static_cast<double>(k) * k);
      series += term;
      if (term < 1e-18 * series) break;
    }
    denom = -std::expm1(-u) - std::exp(-u) * series;
  } else {
    denom = 1.0 - specfun::bessel_i0_scaled(u);
  }
  // ln(2N/D) with 2N - D = u^2 (1/2 - 3u/8 + 17u^2/96) + O(u^5) for small u.
  double excess;
  if (u < 1e-3) {
    excess = u * u * (0.5 - 0.375 * u + 17.0 / 96.0 * u * u);
  } else {
    excess = -2.0 * std::expm1(-0.5 * u) - denom;
  }
  const double log_term = std::log1p(excess / denom);
  const double shape = 2.0 * u * specfun::bessel_i1_scaled(u) / denom / log_term;
  return {shape, log_term};
}

}  // namespace detail

/// Effective spot radius of the equivalent circular beam along direction phi.
inline double elliptic_weff(double phi, double w1, double w2, double a) {
  if (!(w1 > 0.0) || !(w2 > 0.0) || !(a > 0.0)) {
    throw std::domain_error("elliptic_weff: W1, W2 and a must be positive");
  }
  const double c = std::cos(phi);
  const double s = std::sin(phi);
  const double a2 = a * a;
  const double log_arg = std::log(4.0 * a2 / (w1 * w2)) + a2 / (w1 * w1) * (1.0 + 2.0 * c * c) +
                         a2 / (w2 * w2) * (1.0 + 2.0 * s * s);
  const double w = specfun::lambert_w0_of_exp(log_arg);
  return std::sqrt(4.0 * a2 / w);
}

/// Transmissivity at zero displacement.
inline double elliptic_max_transmissivity(double w1, double w2, double a) {
  if (!(w1 > 0.0) || !(w2 > 0.0) || !(a > 0.0)) {
    throw std::domain_error("elliptic_max_transmissivity: W1, W2 and a must be positive");
  }
  const double a2 = a * a;
  const double z = a2 * (1.0 / (w1 * w1) - 1.0 / (w2 * w2));
  const double sum = a2 * (1.0 / (w1 * w1) + 1.0 / (w2 * w2));
  const double first = specfun::bessel_i0_scaled(z) * std::exp(std::abs(z) - sum);

  const double xi = 1.0 / w1 - 1.0 / w2;
  const double u = a2 * xi * xi;
  const double prefactor = -2.0 * std::expm1(-0.5 * u);
  if (prefactor == 0.0) return 1.0 - first;
  const auto ss = detail::shape_scale(u);
  const double ratio = (w1 + w2) / std::abs(w1 - w2);  // (W1+W2)^2 / |W1^2 - W2^2|
  // ratio / R = ratio * log_term^{1/shape}
  const double arg = ratio * std::pow(ss.log_term, 1.0 / ss.shape);
  return 1.0 - first - prefactor * std::exp(-std::pow(arg, ss.shape));
}

inline double elliptic_transmissivity(const EllipticSample& s, double a) {
  const double t0 = elliptic_max_transmissivity(s.w1, s.w2, a);
  const double d = std::hypot(s.x, s.y);
  if (d == 0.0) return t0;
  const double phi0 = std::atan2(s.y, s.x);
  const double weff = elliptic_weff(s.phi - phi0, s.w1, s.w2, a);
  const double xi = 2.0 / weff;
  const auto ss = detail::shape_scale(a * a * xi * xi);
  const double arg = (d / a) * std::pow(ss.log_term, 1.0 / ss.shape);
  return t0 * std::exp(-std::pow(arg, ss.shape));
}

}  // namespace catlink
