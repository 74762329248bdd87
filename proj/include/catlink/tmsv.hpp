#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "catlink/phase_point.hpp"

namespace catlink {

/// Two-mode squeezed vacuum with squeezing r.
class TmsvState {
 public:
  explicit TmsvState(double r) : r_(r) {
    if (!(r >= 0.0) || !std::isfinite(r)) throw std::domain_error("TmsvState: r must be >= 0");
  }
  [[nodiscard]] double r() const { return r_; }

 private:
  double r_;
};

inline double tmsv_wigner(const TmsvState& state, PhasePoint a, PhasePoint b) {
  const double r = state.r();
  const double sum_x = a.x + b.x;
  const double diff_p = a.p - b.p;
  const double diff_x = a.x - b.x;
  const double sum_p = a.p + b.p;
  const double expo = -std::exp(-2.0 * r) * (sum_x * sum_x + diff_p * diff_p) -
                      std::exp(2.0 * r) * (diff_x * diff_x + sum_p * sum_p);
  return 4.0 / (std::numbers::pi * std::numbers::pi) * std::exp(expo);
}

/// TMSV after arm A passes a loss channel of transmissivity t_a and arm B one of t_b.
inline double attenuated_tmsv_wigner(const TmsvState& state, double t_a, double t_b, PhasePoint a,
                                     PhasePoint b) {
  if (!(t_a >= 0.0 && t_a <= 1.0) || !(t_b >= 0.0 && t_b <= 1.0)) {
    throw std::domain_error("attenuated_tmsv_wigner: transmissivity outside [0, 1]");
  }
  const double r = state.r();
  const double tau = 1.0 + (std::cosh(2.0 * r) - 1.0) * (t_a + t_b - 2.0 * t_a * t_b);
  const double sa = std::sqrt(t_b);  // multiplies mode-A quadratures
  const double sb = std::sqrt(t_a);  // multiplies mode-B quadratures

  const double plus_x = a.x * sa + b.x * sb;
  const double minus_p = a.p * sa - b.p * sb;
  const double minus_x = a.x * sa - b.x * sb;
  const double plus_p = a.p * sa + b.p * sb;

  const double expo =
      -std::exp(-2.0 * r) / tau * (plus_x * plus_x + minus_p * minus_p) -
      std::exp(2.0 * r) / tau * (minus_x * minus_x + plus_p * plus_p) -
      2.0 / tau * ((1.0 - t_b) * a.norm_sq() + (1.0 - t_a) * b.norm_sq());
  return 4.0 / (std::numbers::pi * std::numbers::pi * tau) * std::exp(expo);
}

}  // namespace catlink
