#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "catlink/gaussian_mixture.hpp"
#include "catlink/phase_point.hpp"

namespace catlink {

/// Superposition N^{-1}(|alpha0> + e^{i phi}|-alpha0>) of coherent states.
class CatState {
 public:
  CatState(std::complex<double> alpha0, double phi) : alpha0_(alpha0), phi_(phi) {
    if (!std::isfinite(alpha0.real()) || !std::isfinite(alpha0.imag()) || !std::isfinite(phi)) {
      throw std::domain_error("CatState: non-finite parameters");
    }
    if (!(norm_sq() > 1e-14)) {
      throw std::domain_error("CatState: normalization vanishes (alpha0 = 0 with phi = pi)");
    }
  }

  [[nodiscard]] std::complex<double> alpha0() const { return alpha0_; }
  [[nodiscard]] double phi() const { return phi_; }
  [[nodiscard]] double mean_amplitude_sq() const { return std::norm(alpha0_); }

  /// N^2 = 2 + 2 exp(-2|alpha0|^2) cos(phi).
  [[nodiscard]] double norm_sq() const {
    return 2.0 + 2.0 * std::exp(-2.0 * std::norm(alpha0_)) * std::cos(phi_);
  }

 private:
  std::complex<double> alpha0_;
  double phi_;
};

/// Wigner function of the cat state as a three-term Gaussian mixture.
inline GaussianMixture cat_mixture(const CatState& state) {
  const double pref = 2.0 / (std::numbers::pi * state.norm_sq());
  const double a = state.alpha0().real();
  const double b = state.alpha0().imag();
  GaussianMixture w;
  w.add({pref, a, b, 0.5});
  w.add({pref, -a, -b, 0.5});
  // 2 e^{-2|z|^2} cos(phi + 4 Im(conj(alpha0) z)),  Im(conj(alpha0) z) = a p - b x
  w.add_fringe(2.0 * pref * std::polar(1.0, state.phi()), {0.0, 0.0}, 0.5, -4.0 * b, 4.0 * a);
  return w;
}

/// Coherent state |beta>: (2/pi) exp(-2|z - beta|^2).
inline GaussianMixture coherent_mixture(std::complex<double> beta) {
  GaussianMixture w;
  w.add({2.0 / std::numbers::pi, beta.real(), beta.imag(), 0.5});
  return w;
}

inline GaussianMixture vacuum_mixture() { return coherent_mixture({0.0, 0.0}); }

/// Direct three-term evaluation of the cat Wigner function.
inline double cat_wigner(const CatState& state, PhasePoint point) {
  const std::complex<double> alpha = point.amplitude();
  const std::complex<double> a0 = state.alpha0();
  const double interference = 2.0 * std::exp(-2.0 * std::norm(alpha)) *
                              std::cos(state.phi() + 4.0 * (std::conj(a0) * alpha).imag());
  return 2.0 / (std::numbers::pi * state.norm_sq()) *
         (std::exp(-2.0 * std::norm(alpha - a0)) + std::exp(-2.0 * std::norm(alpha + a0)) +
          interference);
}

/// Output of the teleportation map z -> (1/g^2)[W * G_V](z/g) for a cat input.
inline GaussianMixture teleported_mixture(const GaussianMixture& input, double gain,
                                          double variance) {
  if (!(variance > 0.0)) throw std::domain_error("teleport: variance must be positive");
  if (!(gain > 0.0)) throw std::domain_error("teleport: gain must be positive");
  return input.convolved(variance).rescaled(gain);
}

inline double teleported_cat_analytic(const CatState& state, double gain, double variance,
                                      PhasePoint point) {
  return teleported_mixture(cat_mixture(state), gain, variance)(point);
}

/// Overlap fidelity between the cat and its teleported image.
inline double teleported_cat_fidelity(const CatState& state, double gain, double variance) {
  const auto in = cat_mixture(state);
  return mixture_overlap(in, teleported_mixture(in, gain, variance));
}

}  // namespace catlink
