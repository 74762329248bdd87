#pragma once

// Monte Carlo experiments: fixed-attenuation curves, fading-channel curves,
// mean-loss estimation and channel calibration.
//
// Sample i of arm k always draws from RandomStream::for_sample(seed, k, i), at
// every sweep point. The sweep therefore uses common random numbers, and the
// loss-matching bisection sees exactly the draws the curve later uses.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "catlink/cat_state.hpp"
#include "catlink/channel.hpp"
#include "catlink/parallel.hpp"
#include "catlink/random.hpp"
#include "catlink/teleport.hpp"
#include "catlink/wigner_grid.hpp"

namespace catlink {

enum class ArmMode { Both, AliceOnly, BobOnly };

inline std::string_view to_string(ArmMode m) {
  switch (m) {
    case ArmMode::Both: return "both";
    case ArmMode::AliceOnly: return "alice";
    default: return "bob";
  }
}

inline ArmMode arm_mode_from_string(std::string_view s) {
  if (s == "both") return ArmMode::Both;
  if (s == "alice") return ArmMode::AliceOnly;
  if (s == "bob") return ArmMode::BobOnly;
  throw std::invalid_argument("unknown arm mode: " + std::string(s));
}

/// How a fading realization's fidelity is obtained.
enum class FidelityMethod {
  Exact,       // closed-form overlap of the teleported Gaussian mixture, per sample
  Binned,      // lattice overlap, evaluated once per occupied (V', g) bin
  ClosedForm,  // unity-gain formula at the sample's V', ignoring the rescale
};

inline std::string_view to_string(FidelityMethod m) {
  switch (m) {
    case FidelityMethod::Exact: return "exact";
    case FidelityMethod::Binned: return "binned";
    default: return "closed-form";
  }
}

inline FidelityMethod fidelity_method_from_string(std::string_view s) {
  if (s == "exact") return FidelityMethod::Exact;
  if (s == "binned") return FidelityMethod::Binned;
  if (s == "closed-form") return FidelityMethod::ClosedForm;
  throw std::invalid_argument("unknown fidelity method: " + std::string(s));
}

struct SweepPoint {
  enum class Kind { Transmissivity, SigmaOverAperture, TargetLossDb };
  Kind kind;
  double value;
};

struct BinningSpec {
  std::size_t variance_bins = 400;
  std::size_t gain_bins = 100;
};

struct ExperimentConfig {
  CatState cat{{0.0, 1.5}, std::numbers::pi};
  double r = 1.15;
  double eta_sq = 0.99;
  ChannelModel channel = FixedChannel{1.0};
  GainMode gain_mode = GainMode::Balanced;
  ArmMode arms = ArmMode::Both;
  FidelityMethod method = FidelityMethod::Binned;
  std::size_t n_samples = 100000;
  std::uint64_t seed = 20190101;
  std::vector<SweepPoint> sweep;
  GridSpec grid = GridSpec::for_cat(cat);
  BinningSpec binning;
  unsigned workers = 0;

  void validate() const {
    if (n_samples < 1) throw std::invalid_argument("ExperimentConfig: n_samples must be >= 1");
    if (sweep.empty()) throw std::invalid_argument("ExperimentConfig: sweep is empty");
    if (!(r >= 0.0)) throw std::domain_error("ExperimentConfig: r must be >= 0");
    eta_from_intensity(eta_sq);
    catlink::validate(channel);
    grid.validate();
    if (binning.variance_bins < 1 || binning.gain_bins < 1) {
      throw std::invalid_argument("ExperimentConfig: empty binning");
    }
  }
};

struct PointResult {
  double strength = 0.0;      // T for fixed channels, sigma/a for fading ones
  double mean_loss_db = 0.0;  // -10 log10(<T_A><T_B>)
  double mean_fidelity = 0.0;
  double fidelity_stderr = 0.0;
  double mean_t_a = 1.0;
  double mean_t_b = 1.0;
  std::optional<double> origin_value;  // teleported W(0, 0); fixed channels only
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t occupied_bins = 0;

  /// Mean single-arm transmissivity, averaged over the arms that fade.
  [[nodiscard]] double mean_t() const { return 0.5 * (mean_t_a + mean_t_b); }
};

struct ExperimentResult {
  std::string model;
  std::vector<PointResult> points;
};

struct LossEstimate {
  double loss_db;
  double stderr_db;
  double mean_t;
  double stderr_t;
};

namespace detail {

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Sigma-independent part of every channel use of both arms.
class ArmDraws {
 public:
  ArmDraws(const ChannelModel& channel, ArmMode arms, std::size_t n, std::uint64_t seed,
           unsigned workers)
      : a_(arms != ArmMode::BobOnly ? n : 0), b_(arms != ArmMode::AliceOnly ? n : 0), n_(n) {
    parallel_for(n, workers, [&](std::size_t i) {
      if (!a_.empty()) {
        auto rng = RandomStream::for_sample(seed, 0, i);
        a_[i] = scaled_draw(channel, rng);
      }
      if (!b_.empty()) {
        auto rng = RandomStream::for_sample(seed, 1, i);
        b_[i] = scaled_draw(channel, rng);
      }
    });
  }

  [[nodiscard]] std::size_t size() const { return n_; }

  /// Arm transmissivities at centroid deviation sigma; lossless arms read 1.
  [[nodiscard]] std::vector<double> arm(int which, double sigma) const {
    const auto& draws = which == 0 ? a_ : b_;
    std::vector<double> t(n_, 1.0);
    for (std::size_t i = 0; i < draws.size(); ++i) t[i] = draws[i].at(sigma);
    return t;
  }

  [[nodiscard]] double mean_loss_db(double sigma) const;

 private:
  std::vector<ScaledTransmissivity> a_;
  std::vector<ScaledTransmissivity> b_;
  std::size_t n_;
};

inline double aperture_of(const ChannelModel& m) {
  if (const auto* bw = std::get_if<BeamWanderingChannel>(&m)) return bw->geometry.aperture;
  if (const auto* el = std::get_if<EllipticChannel>(&m)) return el->geometry.aperture;
  return 1.0;
}

inline double loss_from_means(double mean_a, double mean_b) {
  const double prod = mean_a * mean_b;
  return prod > 0.0 ? -10.0 * std::log10(prod) : std::numeric_limits<double>::infinity();
}

inline double ArmDraws::mean_loss_db(double sigma) const {
  return loss_from_means(mean_of(arm(0, sigma)), mean_of(arm(1, sigma)));
}

}  // namespace detail

/// Single-arm mean loss -10 log10 <T> with its delta-method standard error.
inline LossEstimate estimate_mean_loss(const ChannelModel& channel, std::size_t n,
                                       std::uint64_t seed, unsigned workers = 0) {
  if (n < 10000) throw std::invalid_argument("estimate_mean_loss: needs n >= 10^4 samples");
  validate(channel);
  std::vector<double> t(n);
  parallel_for(n, workers, [&](std::size_t i) {
    auto rng = RandomStream::for_sample(seed, 0, i);
    t[i] = sample_transmissivity(channel, rng);
  });
  const double mean = detail::mean_of(t);
  double ss = 0.0;
  for (double x : t) ss += (x - mean) * (x - mean);
  const double se = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n)) : 0.0;
  return {-10.0 * std::log10(mean), 10.0 / std::numbers::ln10 * se / mean, mean, se};
}

/// Two-arm (or single-arm, per `arms`) loss -10 log10(<T_A><T_B>) at the
/// channel's current sigma, from the same draws the fading curve uses.
inline double sampled_mean_loss(const ChannelModel& channel, ArmMode arms, std::size_t n,
                                std::uint64_t seed, unsigned workers = 0) {
  return detail::ArmDraws(channel, arms, n, seed, workers).mean_loss_db(sigma_of(channel));
}

/// Loss floor reached with no centroid wander (the cut-off loss).
inline double cutoff_loss_db(const ChannelModel& channel, ArmMode arms, std::size_t n,
                             std::uint64_t seed, unsigned workers = 0) {
  return sampled_mean_loss(with_sigma(channel, 0.0), arms, n, seed, workers);
}

/// Centroid deviation sigma (metres) at which the sampled mean loss equals
/// `target_db`. Throws std::domain_error below the cut-off loss.
inline double sigma_for_mean_loss(const detail::ArmDraws& draws, double aperture,
                                  double target_db) {
  const double floor_db = draws.mean_loss_db(0.0);
  if (target_db < floor_db) {
    throw std::domain_error("sigma_for_mean_loss: target " + std::to_string(target_db) +
                            " dB is below the cut-off loss " + std::to_string(floor_db) + " dB");
  }
  // Each draw's T is non-increasing in sigma, hence so is the mean.
  double lo = 0.0;
  double hi = aperture;
  while (draws.mean_loss_db(hi) < target_db) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e4 * aperture) throw std::domain_error("sigma_for_mean_loss: target unreachable");
  }
  for (int iter = 0; iter < 200 && hi - lo > 1e-12 * aperture; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (draws.mean_loss_db(mid) < target_db ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

inline double sigma_for_mean_loss(const ChannelModel& channel, ArmMode arms, double target_db,
                                  std::size_t n, std::uint64_t seed, unsigned workers = 0) {
  if (std::holds_alternative<FixedChannel>(channel)) {
    throw std::invalid_argument("sigma_for_mean_loss: fixed channels have no sigma");
  }
  return sigma_for_mean_loss(detail::ArmDraws(channel, arms, n, seed, workers),
                             detail::aperture_of(channel), target_db);
}

/// Lattice overlap between the cat and its teleported image.
inline double grid_teleport_fidelity(const WignerGrid& input_grid, const GaussianMixture& input,
                                     double gain, double v_eff) {
  return lattice_overlap(input_grid, teleported_mixture(input, gain, v_eff));
}

/// Unity-gain symmetric fixed channels: closed-form fidelity and the
/// teleported Wigner value at the origin.
inline ExperimentResult run_fixed_curve(const ExperimentConfig& config) {
  config.validate();
  const auto* fixed = std::get_if<FixedChannel>(&config.channel);
  if (fixed == nullptr) throw std::invalid_argument("run_fixed_curve: channel must be fixed");
  if (config.gain_mode != GainMode::Unity) {
    throw std::invalid_argument("run_fixed_curve: fixed curves use unity gain");
  }
  const double eta = eta_from_intensity(config.eta_sq);
  ExperimentResult result{"fixed", {}};
  for (const auto& pt : config.sweep) {
    double t;
    switch (pt.kind) {
      case SweepPoint::Kind::Transmissivity: t = pt.value; break;
      case SweepPoint::Kind::TargetLossDb: t = symmetric_transmissivity_for_loss(pt.value); break;
      default: throw std::invalid_argument("run_fixed_curve: sweep must be T or loss values");
    }
    const double v = teleport_variance({config.r, 1.0, t, t, eta});
    const double v_eff = effective_variance(v, eta);
    PointResult p;
    p.strength = t;
    p.mean_t_a = p.mean_t_b = t;
    p.mean_loss_db = mean_loss_db(t, t);
    p.mean_fidelity = closed_form_fidelity(v_eff, config.cat);
    p.fidelity_stderr = 0.0;
    p.origin_value = teleported_cat_analytic(config.cat, 1.0, v_eff, {0.0, 0.0});
    p.accepted = 1;
    result.points.push_back(p);
  }
  return result;
}

/// Fading channels: sample both arms, teleport each realization with the
/// configured gain, average the per-realization fidelities.
inline ExperimentResult run_fading_curve(const ExperimentConfig& config) {
  config.validate();
  if (std::holds_alternative<FixedChannel>(config.channel)) {
    throw std::invalid_argument("run_fading_curve: channel must be a fading model");
  }
  const double eta = eta_from_intensity(config.eta_sq);
  const double a = detail::aperture_of(config.channel);
  const std::size_t n = config.n_samples;
  const auto input = cat_mixture(config.cat);
  std::optional<WignerGrid> input_grid;
  if (config.method == FidelityMethod::Binned) input_grid = WignerGrid::sample(config.grid, input);

  const detail::ArmDraws draws(config.channel, config.arms, n, config.seed, config.workers);

  ExperimentResult result{std::string(model_name(config.channel)), {}};
  for (const auto& pt : config.sweep) {
    double sigma;
    switch (pt.kind) {
      case SweepPoint::Kind::SigmaOverAperture: sigma = pt.value * a; break;
      case SweepPoint::Kind::TargetLossDb: sigma = sigma_for_mean_loss(draws, a, pt.value); break;
      default: throw std::invalid_argument("run_fading_curve: sweep must be sigma/a or loss values");
    }
    const std::vector<double> t_a = draws.arm(0, sigma);
    const std::vector<double> t_b = draws.arm(1, sigma);

    // Per-sample (V', g); rejected samples carry g = 0.
    std::vector<double> v_eff(n, 0.0);
    std::vector<double> gain(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double ta = t_a[i];
      const double tb = t_b[i];
      if (config.gain_mode == GainMode::Balanced && (ta <= 0.0 || tb <= 0.0)) continue;
      const double g = gain_for(config.gain_mode, ta, tb);
      gain[i] = g;
      v_eff[i] = effective_variance(teleport_variance({config.r, g, ta, tb, eta}), eta);
    }

    std::vector<double> fid(n, 0.0);
    std::size_t occupied = 0;
    if (config.method == FidelityMethod::Binned) {
      const std::size_t nv = config.binning.variance_bins;
      const std::size_t ng = config.binning.gain_bins;
      auto bin_of = [&](double v, double g) {
        const auto iv = std::min(nv - 1, static_cast<std::size_t>(v / (1.0 + v) * nv));
        const auto ig = std::min(ng - 1, static_cast<std::size_t>(g / (1.0 + g) * ng));
        return iv * ng + ig;
      };
      struct Bin {
        double sum_v = 0.0;
        double sum_g = 0.0;
        std::size_t count = 0;
        double fidelity = 0.0;
      };
      std::map<std::size_t, Bin> bins;
      for (std::size_t i = 0; i < n; ++i) {
        if (gain[i] <= 0.0) continue;
        auto& b = bins[bin_of(v_eff[i], gain[i])];
        b.sum_v += v_eff[i];
        b.sum_g += gain[i];
        ++b.count;
      }
      std::vector<Bin*> ordered;
      ordered.reserve(bins.size());
      for (auto& [key, b] : bins) ordered.push_back(&b);
      parallel_for(ordered.size(), config.workers, [&](std::size_t k) {
        Bin& b = *ordered[k];
        const double cnt = static_cast<double>(b.count);
        b.fidelity = grid_teleport_fidelity(*input_grid, input, b.sum_g / cnt, b.sum_v / cnt);
      });
      for (std::size_t i = 0; i < n; ++i) {
        if (gain[i] > 0.0) fid[i] = bins[bin_of(v_eff[i], gain[i])].fidelity;
      }
      occupied = bins.size();
    } else {
      parallel_for(n, config.workers, [&](std::size_t i) {
        if (gain[i] <= 0.0) return;
        fid[i] = config.method == FidelityMethod::Exact
                     ? mixture_overlap(input, teleported_mixture(input, gain[i], v_eff[i]))
                     : closed_form_fidelity(v_eff[i], config.cat);
      });
    }

    PointResult p;
    p.strength = sigma / a;
    p.mean_t_a = detail::mean_of(t_a);
    p.mean_t_b = detail::mean_of(t_b);
    p.mean_loss_db = detail::loss_from_means(p.mean_t_a, p.mean_t_b);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (gain[i] > 0.0) {
        sum += fid[i];
        ++p.accepted;
      } else {
        ++p.rejected;
      }
    }
    if (p.accepted > 0) {
      const double mean = sum / static_cast<double>(p.accepted);
      double ss = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (gain[i] > 0.0) ss += (fid[i] - mean) * (fid[i] - mean);
      }
      p.mean_fidelity = mean;
      p.fidelity_stderr =
          p.accepted > 1
              ? std::sqrt(ss / static_cast<double>(p.accepted - 1) / static_cast<double>(p.accepted))
              : 0.0;
    }
    p.occupied_bins = occupied;
    result.points.push_back(p);
  }
  return result;
}

/// Mean of the width broadening factor kappa (E[W_i^2] = kappa^2 W^2) for which the
/// elliptic channel's single-arm mean loss at `sigma_over_a` equals `target_db`.
inline double calibrate_width_broadening(const BeamGeometry& geometry, double var_log_sq_width,
                                         double corr, double sigma_over_a, double target_db,
                                         std::size_t n, std::uint64_t seed, unsigned workers = 0) {
  auto loss_at = [&](double kappa) {
    BeamGeometry broadened = geometry;
    broadened.width = kappa * geometry.width;
    const EllipticChannel ch{geometry, sigma_over_a * geometry.aperture,
                             WidthStats::centred_on(broadened, var_log_sq_width, corr)};
    return estimate_mean_loss(ch, n, seed, workers).loss_db;
  };
  double lo = 0.25;
  double hi = 4.0;
  if (loss_at(lo) > target_db || loss_at(hi) < target_db) {
    throw std::domain_error("calibrate_width_broadening: target outside the bracket");
  }
  for (int iter = 0; iter < 60; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (loss_at(mid) < target_db ? lo : hi) = mid;
    if (hi - lo < 1e-7) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace catlink
