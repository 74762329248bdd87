#pragma once

// Scalar teleportation formulas: added-noise variance for arbitrary gain and
// asymmetric arm transmissivities, the detector correction, gain strategies,
// the closed-form cat fidelity and loss accounting.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

#include "catlink/cat_state.hpp"

namespace catlink {

/// Squeezing r, gain g, arm transmissivities and detector amplitude efficiency.
struct TeleportSetting {
  double r = 1.15;
  double gain = 1.0;
  double t_a = 1.0;
  double t_b = 1.0;
  double eta = 1.0;

  void validate() const {
    if (!(r >= 0.0) || !std::isfinite(r)) throw std::domain_error("TeleportSetting: r < 0");
    if (!(gain > 0.0) || !std::isfinite(gain)) {
      throw std::domain_error("TeleportSetting: gain must be positive");
    }
    if (!(t_a >= 0.0 && t_a <= 1.0) || !(t_b >= 0.0 && t_b <= 1.0)) {
      throw std::domain_error("TeleportSetting: transmissivity outside [0, 1]");
    }
    if (!(eta > 0.0 && eta <= 1.0)) {
      throw std::domain_error("TeleportSetting: eta outside (0, 1]");
    }
  }
};

/// Coefficients of V = c_plus e^{2r} + c_minus e^{-2r} + c_loss.
struct VarianceTerms {
  double c_plus;
  double c_minus;
  double c_loss;
};

inline VarianceTerms teleport_variance_terms(double gain, double t_a, double t_b) {
  const double ga = gain * std::sqrt(t_a);
  const double sb = std::sqrt(t_b);
  const double denom = 4.0 * gain * gain;
  return {(ga - sb) * (ga - sb) / denom, (ga + sb) * (ga + sb) / denom,
          (2.0 * gain * gain * (1.0 - t_a) + 2.0 * (1.0 - t_b)) / denom};
}

inline double teleport_variance(const TeleportSetting& s) {
  if (!(s.gain > 0.0)) throw std::domain_error("teleport_variance: gain must be positive");
  s.validate();
  const auto c = teleport_variance_terms(s.gain, s.t_a, s.t_b);
  return c.c_plus * std::exp(2.0 * s.r) + c.c_minus * std::exp(-2.0 * s.r) + c.c_loss;
}

/// V' = V + (1 - eta^2)/eta^2, eta the amplitude efficiency.
inline double effective_variance(double variance, double eta) {
  if (!(eta > 0.0) || eta > 1.0) throw std::domain_error("effective_variance: eta outside (0, 1]");
  if (!(variance >= 0.0)) throw std::domain_error("effective_variance: variance < 0");
  return variance + (1.0 - eta * eta) / (eta * eta);
}

/// Amplitude efficiency from the intensity efficiency eta^2 quoted in figures.
inline double eta_from_intensity(double eta_sq) {
  if (!(eta_sq > 0.0) || eta_sq > 1.0) {
    throw std::domain_error("eta_from_intensity: eta^2 outside (0, 1]");
  }
  return std::sqrt(eta_sq);
}

/// Unity-gain cat fidelity as a function of the effective noise variance.
inline double closed_form_fidelity(double v_eff, const CatState& cat) {
  if (!(v_eff >= 0.0)) throw std::domain_error("closed_form_fidelity: V' < 0");
  const double s = cat.mean_amplitude_sq();
  const double one_v = 1.0 + v_eff;
  const double num = 1.0 + std::exp(-4.0 * s) - std::exp(-4.0 * v_eff * s / one_v) -
                     std::exp(-4.0 * s / one_v);
  const double c = 1.0 + std::exp(-2.0 * s) * std::cos(cat.phi());
  return 1.0 / one_v - num / (2.0 * one_v * c * c);
}

enum class GainMode { Unity, Balanced };

inline std::string_view to_string(GainMode m) {
  return m == GainMode::Unity ? "unity" : "balanced";
}

inline GainMode gain_mode_from_string(std::string_view s) {
  if (s == "unity") return GainMode::Unity;
  if (s == "balanced") return GainMode::Balanced;
  throw std::invalid_argument("unknown gain mode: " + std::string(s));
}

/// Unity -> 1; Balanced -> sqrt(T_B / T_A).
inline double gain_for(GainMode mode, double t_a, double t_b) {
  if (mode == GainMode::Unity) return 1.0;
  if (!(t_a > 0.0) || t_a > 1.0 || !(t_b >= 0.0) || t_b > 1.0) {
    throw std::domain_error("gain_for: balanced gain needs T_A in (0, 1] and T_B in [0, 1]");
  }
  return std::sqrt(t_b / t_a);
}

/// -10 log10(T_A T_B); +infinity when either arm is fully lost.
inline double mean_loss_db(double t_a, double t_b) {
  if (!(t_a >= 0.0 && t_a <= 1.0) || !(t_b >= 0.0 && t_b <= 1.0)) {
    throw std::domain_error("mean_loss_db: transmissivity outside [0, 1]");
  }
  const double prod = t_a * t_b;
  if (prod <= 0.0) return std::numeric_limits<double>::infinity();
  return prod >= 1.0 ? 0.0 : -10.0 * std::log10(prod);
}

/// Symmetric-arm transmissivity whose two-arm loss equals `loss_db`.
inline double symmetric_transmissivity_for_loss(double loss_db) {
  return std::pow(10.0, -loss_db / 20.0);
}

}  // namespace catlink
