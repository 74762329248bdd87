#pragma once

// Modified Bessel functions I0, I1 and the principal branch of Lambert W.
//
// I0/I1 use the ascending power series below kBesselCrossover and the
// Hankel asymptotic expansion above it. The exponentially scaled variants
// (e^{-|x|} I_n(x)) never overflow and are what the channel models use.

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace catlink::specfun {

inline constexpr double kBesselCrossover = 25.0;
inline constexpr double kBesselMaxArg = 700.0;

namespace detail {

// Sum (x/2)^{2k+n} / (k! (k+n)!) for n in {0, 1}; all terms positive.
inline double bessel_series(double x, int order) {
  const double q = 0.25 * x * x;
  double term = order == 0 ? 1.0 : 0.5 * x;
  double sum = term;
  for (int k = 1; k < 2000; ++k) {
    term *= q / (static_cast<double>(k) * static_cast<double>(k + order));
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum;
}

// e^{-x} I_n(x) for x >= kBesselCrossover via
// I_n(x) ~ e^x / sqrt(2 pi x) * sum_k (-1)^k a_k(n) / x^k,
// a_k(n) = prod_{j=1..k} (4n^2 - (2j-1)^2) / (8 j).
inline double bessel_asymptotic_scaled(double x, int order) {
  const double mu = 4.0 * order * order;
  double term = 1.0;
  double sum = 1.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int j = 1; j < 200; ++j) {
    const double odd = 2.0 * j - 1.0;
    term *= -(mu - odd * odd) / (8.0 * j * x);
    if (std::abs(term) >= prev) break;  // series started diverging
    sum += term;
    prev = std::abs(term);
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

inline void check_finite(double x, const char* fn) {
  if (!std::isfinite(x)) {
    throw std::domain_error(std::string(fn) + ": argument is not finite");
  }
}

inline void check_range(double x, const char* fn) {
  check_finite(x, fn);
  if (std::abs(x) > kBesselMaxArg) {
    throw std::range_error(std::string(fn) + ": |x| > 700 overflows");
  }
}

}  // namespace detail

/// e^{-|x|} I0(x); defined for every finite x.
inline double bessel_i0_scaled(double x) {
  detail::check_finite(x, "bessel_i0_scaled");
  const double ax = std::abs(x);
  if (ax < kBesselCrossover) return detail::bessel_series(ax, 0) * std::exp(-ax);
  return detail::bessel_asymptotic_scaled(ax, 0);
}

/// e^{-|x|} I1(x); odd in x.
inline double bessel_i1_scaled(double x) {
  detail::check_finite(x, "bessel_i1_scaled");
  const double ax = std::abs(x);
  const double v = ax < kBesselCrossover
                       ? detail::bessel_series(ax, 1) * std::exp(-ax)
                       : detail::bessel_asymptotic_scaled(ax, 1);
  return x < 0 ? -v : v;
}

inline double bessel_i0(double x) {
  detail::check_range(x, "bessel_i0");
  const double ax = std::abs(x);
  if (ax < kBesselCrossover) return detail::bessel_series(ax, 0);
  return detail::bessel_asymptotic_scaled(ax, 0) * std::exp(ax);
}

inline double bessel_i1(double x) {
  detail::check_range(x, "bessel_i1");
  const double ax = std::abs(x);
  const double v = ax < kBesselCrossover
                       ? detail::bessel_series(ax, 1)
                       : detail::bessel_asymptotic_scaled(ax, 1) * std::exp(ax);
  return x < 0 ? -v : v;
}

/// Principal branch W0 of w e^w = x for x >= -1/e.
///
/// Starts from a branch-point series near -1/e, log1p for moderate x and the
/// log-log asymptote for large x, then refines with Halley steps.
inline double lambert_w0(double x) {
  constexpr double kInvE = 1.0 / std::numbers::e;
  detail::check_finite(x, "lambert_w0");
  if (x < -kInvE) {
    // Tolerate rounding of an argument computed as exactly -1/e.
    if (x < -kInvE * (1.0 + 4.0 * std::numeric_limits<double>::epsilon())) {
      throw std::domain_error("lambert_w0: x < -1/e");
    }
    return -1.0;
  }
  if (x == 0.0) return 0.0;

  double w;
  if (x < -0.25) {
    const double p = std::sqrt(2.0 * (std::numbers::e * x + 1.0));
    w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  } else if (x < 3.0) {
    const double l = std::log1p(x);
    w = l * (1.0 - std::log1p(l) / (2.0 + l));
  } else {
    const double l1 = std::log(x);
    const double l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }
  if (w <= -1.0) return -1.0;

  for (int iter = 0; iter < 100; ++iter) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    const double wp1 = w + 1.0;
    if (wp1 <= 0.0) break;
    const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    w -= step;
    if (std::abs(step) <= 1e-14 * (1.0 + std::abs(w))) break;
  }
  return w;
}

/// W0(exp(log_x)) without forming exp(log_x), for arguments beyond double range.
inline double lambert_w0_of_exp(double log_x) {
  detail::check_finite(log_x, "lambert_w0_of_exp");
  if (log_x < 500.0) return lambert_w0(std::exp(log_x));
  // Solve w + ln w = log_x by Newton; w > 490 here so the iteration is benign.
  double w = log_x - std::log(log_x);
  for (int iter = 0; iter < 100; ++iter) {
    const double step = (w + std::log(w) - log_x) / (1.0 + 1.0 / w);
    w -= step;
    if (std::abs(step) <= 1e-14 * w) break;
  }
  return w;
}

}  // namespace catlink::specfun
