#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "catlink/beam_wandering.hpp"
#include "catlink/elliptic.hpp"
#include "catlink/random.hpp"

namespace catlink {

/// Statistics of Theta_i = ln(W_i^2 / W0^2): jointly Gaussian, equal
/// marginals, correlation `corr`.
struct WidthStats {
  double mean_log_sq_width = 0.0;
  double var_log_sq_width = 0.0;
  double corr = 0.5;

  /// Mean chosen so that E[W_i^2] = W^2 for the receiver width W.
  static WidthStats centred_on(const BeamGeometry& g, double variance, double corr) {
    return {std::log(g.width * g.width / (g.w0 * g.w0)) - 0.5 * variance, variance, corr};
  }

  void validate() const {
    if (!(var_log_sq_width >= 0.0) || !std::isfinite(mean_log_sq_width)) {
      throw std::domain_error("WidthStats: variance must be >= 0");
    }
    if (!(std::abs(corr) <= 1.0)) throw std::domain_error("WidthStats: |corr| must be <= 1");
  }
};

struct FixedChannel {
  double transmissivity = 1.0;
};

struct BeamWanderingChannel {
  BeamGeometry geometry;
  double sigma = 0.0;  // centroid deviation per axis, metres
};

struct EllipticChannel {
  BeamGeometry geometry;
  double sigma = 0.0;
  WidthStats widths;
};

using ChannelModel = std::variant<FixedChannel, BeamWanderingChannel, EllipticChannel>;

inline std::string_view model_name(const ChannelModel& m) {
  switch (m.index()) {
    case 0: return "fixed";
    case 1: return "beam-wandering";
    default: return "elliptic";
  }
}

inline void validate(const ChannelModel& model) {
  std::visit(
      [](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, FixedChannel>) {
          if (!(m.transmissivity >= 0.0 && m.transmissivity <= 1.0)) {
            throw std::domain_error("FixedChannel: T outside [0, 1]");
          }
        } else {
          m.geometry.validate();
          if (!(m.sigma >= 0.0)) throw std::domain_error("channel: sigma must be >= 0");
          if constexpr (std::is_same_v<M, EllipticChannel>) m.widths.validate();
        }
      },
      model);
}

/// Centroid deviation of a fading model; 0 for Fixed.
inline double sigma_of(const ChannelModel& model) {
  return std::visit(
      [](const auto& m) {
        if constexpr (std::is_same_v<std::decay_t<decltype(m)>, FixedChannel>) {
          return 0.0;
        } else {
          return m.sigma;
        }
      },
      model);
}

/// Same model with the centroid deviation replaced (no-op for Fixed).
inline ChannelModel with_sigma(ChannelModel model, double sigma) {
  std::visit(
      [sigma](auto& m) {
        if constexpr (!std::is_same_v<std::decay_t<decltype(m)>, FixedChannel>) m.sigma = sigma;
      },
      model);
  return model;
}

inline EllipticSample draw_elliptic(const EllipticChannel& ch, RandomStream& rng) {
  EllipticSample s;
  s.x = ch.sigma * rng.normal();
  s.y = ch.sigma * rng.normal();
  const double z1 = rng.normal();
  const double z2 = rng.normal();
  const auto& w = ch.widths;
  const double sd = std::sqrt(w.var_log_sq_width);
  const double theta1 = w.mean_log_sq_width + sd * z1;
  const double theta2 =
      w.mean_log_sq_width + sd * (w.corr * z1 + std::sqrt(1.0 - w.corr * w.corr) * z2);
  s.w1 = ch.geometry.w0 * std::exp(0.5 * theta1);
  s.w2 = ch.geometry.w0 * std::exp(0.5 * theta2);
  s.phi = 0.5 * std::numbers::pi * rng.uniform();
  return s;
}

/// A channel use with the centroid deviation left free: since the centroid is
/// sigma times a standard normal pair, T(sigma) = t_max exp(-(sigma rate)^shape).
struct ScaledTransmissivity {
  double t_max = 1.0;
  double shape = 1.0;
  double rate = 0.0;

  [[nodiscard]] double at(double sigma) const {
    if (rate == 0.0 || sigma == 0.0) return t_max;
    return t_max * std::exp(-std::pow(sigma * rate, shape));
  }
};

/// Draws the sigma-independent part of a channel use, consuming the stream
/// exactly as sample_transmissivity does.
inline ScaledTransmissivity scaled_draw(const ChannelModel& model, RandomStream& rng) {
  return std::visit(
      [&rng](const auto& m) -> ScaledTransmissivity {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, FixedChannel>) {
          return {m.transmissivity, 1.0, 0.0};
        } else if constexpr (std::is_same_v<M, BeamWanderingChannel>) {
          const double zx = rng.normal();
          const double zy = rng.normal();
          const auto law = BeamWanderingLaw::for_geometry(m.geometry);
          return {law.max_transmissivity, law.shape,
                  std::hypot(zx, zy) / (m.geometry.aperture * law.scale)};
        } else {
          EllipticChannel unit = m;
          unit.sigma = 1.0;
          const EllipticSample s = draw_elliptic(unit, rng);
          const double a = m.geometry.aperture;
          const double t0 = elliptic_max_transmissivity(s.w1, s.w2, a);
          const double rho = std::hypot(s.x, s.y);
          if (rho == 0.0) return {t0, 1.0, 0.0};
          const double weff = elliptic_weff(s.phi - std::atan2(s.y, s.x), s.w1, s.w2, a);
          const auto ss = detail::shape_scale(4.0 * a * a / (weff * weff));
          return {t0, ss.shape, rho / a * std::pow(ss.log_term, 1.0 / ss.shape)};
        }
      },
      model);
}

/// One channel use: returns the power transmissivity T = t^2.
inline double sample_transmissivity(const ChannelModel& model, RandomStream& rng) {
  return std::visit(
      [&rng](const auto& m) -> double {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, FixedChannel>) {
          return m.transmissivity;
        } else if constexpr (std::is_same_v<M, BeamWanderingChannel>) {
          const double x = m.sigma * rng.normal();
          const double y = m.sigma * rng.normal();
          return bw_transmissivity(std::hypot(x, y), m.geometry);
        } else {
          return elliptic_transmissivity(draw_elliptic(m, rng), m.geometry.aperture);
        }
      },
      model);
}

}  // namespace catlink
