#pragma once

// Resolved run configuration shared by the command-line front end, its JSON
// config files and the run manifest.

#include <cctype>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "catlink/atmosphere.hpp"
#include "catlink/channel.hpp"
#include "catlink/experiment.hpp"
#include "catlink/wigner_grid.hpp"

namespace catlink {

namespace parse {

inline std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline double real_number(std::string_view text) {
  const std::string s = trim(text);
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || s.empty()) {
    throw std::invalid_argument("not a number: '" + s + "'");
  }
  return v;
}

/// Angle: a number, `pi`, `k*pi`, `pi/k` or `k*pi/m`.
inline double angle(std::string_view text) {
  std::string s = trim(text);
  const auto pos = s.find("pi");
  if (pos == std::string::npos) return real_number(s);
  double factor = 1.0;
  std::string head = trim(std::string_view(s).substr(0, pos));
  if (!head.empty()) {
    if (head.back() != '*') throw std::invalid_argument("bad angle: '" + s + "'");
    head.pop_back();
    factor = head == "-" ? -1.0 : real_number(head);
  }
  std::string tail = trim(std::string_view(s).substr(pos + 2));
  double divisor = 1.0;
  if (!tail.empty()) {
    if (tail.front() != '/') throw std::invalid_argument("bad angle: '" + s + "'");
    divisor = real_number(tail.substr(1));
  }
  return factor * std::numbers::pi / divisor;
}

/// Complex number in `x+yi`, `x-yi`, `yi`, `x` or `i` form.
inline std::complex<double> complex_number(std::string_view text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  }
  if (s.empty()) throw std::invalid_argument("empty complex number");
  if (s.back() != 'i' && s.back() != 'j') return {real_number(s), 0.0};
  s.pop_back();
  // Split at the last sign that is not an exponent sign or the leading one.
  std::size_t split = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  auto imag_part = [](const std::string& t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return real_number(t);
  };
  if (split == std::string::npos) return {0.0, imag_part(s)};
  return {real_number(s.substr(0, split)), imag_part(s.substr(split))};
}

inline std::string format_complex(std::complex<double> z) {
  std::string out = csv::format_double(z.real());
  out += z.imag() < 0.0 || std::signbit(z.imag()) ? "-" : "+";
  out += csv::format_double(std::abs(z.imag()));
  out += "i";
  return out;
}

}  // namespace parse

struct EllipticDefaults {
  double var_log_sq_width = 0.1;
  double corr = 0.5;
  // E[W_i^2] = (kappa W)^2. This kappa gives a 3.0 dB single-arm mean loss at
  // sigma = 0.4a (calibrate_width_broadening, 10^5 samples, seed 20190101).
  double width_broadening = 1.529034;
  std::optional<double> mean_log_sq_width;  // overrides the broadening when set

  [[nodiscard]] WidthStats stats(const BeamGeometry& g) const {
    if (mean_log_sq_width) return {*mean_log_sq_width, var_log_sq_width, corr};
    BeamGeometry broadened = g;
    broadened.width = width_broadening * g.width;
    return WidthStats::centred_on(broadened, var_log_sq_width, corr);
  }
};

struct ParameterSweep {
  std::vector<double> r{0.5, 1.15, 3.0};
  std::vector<double> alpha_sq{0.1, 2.25, 25.0};
  std::vector<double> phi{0.0, std::numbers::pi / 2.0, std::numbers::pi};
};

struct RunConfig {
  std::complex<double> alpha0{0.0, 1.5};
  double phi = std::numbers::pi;
  double r = 1.15;
  double eta_sq = 0.99;
  double loss_db = 0.0;  // wigner command
  BeamGeometry geometry;
  AtmosphereParams atmosphere;
  EllipticDefaults elliptic;
  GainMode gain_mode = GainMode::Balanced;
  ArmMode arms = ArmMode::Both;
  FidelityMethod method = FidelityMethod::Binned;
  std::size_t samples = 100000;
  std::uint64_t seed = 20190101;
  unsigned workers = 0;
  std::optional<double> grid_half_width;  // unset: max(8, |alpha0| + 6.5)
  std::size_t grid_points = 512;
  BinningSpec binning;
  std::vector<double> losses_db{2, 3, 4, 5, 6, 8, 10, 12, 15, 20, 25, 30};
  std::vector<double> sigmas_over_a{0.2, 0.4, 0.7, 1.0};
  std::vector<std::string> models{"fixed", "beam-wandering", "elliptic"};
  ParameterSweep sweep;

  [[nodiscard]] CatState cat() const { return CatState(alpha0, phi); }

  [[nodiscard]] GridSpec grid() const {
    if (grid_half_width) return GridSpec::square(*grid_half_width, grid_points);
    return GridSpec::for_cat(cat(), grid_points);
  }

  [[nodiscard]] ChannelModel channel(std::string_view model, double sigma_over_a = 0.0) const {
    if (model == "beam-wandering") {
      return BeamWanderingChannel{geometry, sigma_over_a * geometry.aperture};
    }
    if (model == "elliptic") {
      return EllipticChannel{geometry, sigma_over_a * geometry.aperture, elliptic.stats(geometry)};
    }
    throw std::invalid_argument("unknown channel model: " + std::string(model));
  }

  /// Experiment settings for one model; sweep left empty.
  [[nodiscard]] ExperimentConfig experiment(std::string_view model) const {
    ExperimentConfig c;
    c.cat = cat();
    c.r = r;
    c.eta_sq = eta_sq;
    if (model == "fixed") {
      c.channel = FixedChannel{1.0};
      c.gain_mode = GainMode::Unity;
    } else {
      c.channel = channel(model);
      c.gain_mode = gain_mode;
    }
    c.arms = arms;
    c.method = method;
    c.n_samples = samples;
    c.seed = seed;
    c.grid = grid();
    c.binning = binning;
    c.workers = workers;
    return c;
  }
};

inline nlohmann::json to_json(const RunConfig& c) {
  using nlohmann::json;
  json e = {{"var_log_sq_width", c.elliptic.var_log_sq_width},
            {"corr", c.elliptic.corr},
            {"width_broadening", c.elliptic.width_broadening}};
  if (c.elliptic.mean_log_sq_width) e["mean_log_sq_width"] = *c.elliptic.mean_log_sq_width;
  return json{
      {"alpha0", parse::format_complex(c.alpha0)},
      {"phi", c.phi},
      {"r", c.r},
      {"eta_sq", c.eta_sq},
      {"loss_db", c.loss_db},
      {"geometry", {{"w0", c.geometry.w0}, {"width", c.geometry.width}, {"aperture", c.geometry.aperture}}},
      {"atmosphere",
       {{"ground_cn2", c.atmosphere.ground_cn2},
        {"wind_speed", c.atmosphere.wind_speed},
        {"wavelength", c.atmosphere.wavelength},
        {"distance", c.atmosphere.distance}}},
      {"elliptic", e},
      {"gain_mode", std::string(to_string(c.gain_mode))},
      {"arms", std::string(to_string(c.arms))},
      {"fidelity_method", std::string(to_string(c.method))},
      {"samples", c.samples},
      {"seed", c.seed},
      {"grid",
       {{"half_width", c.grid_half_width ? json(*c.grid_half_width) : json("auto")},
        {"points", c.grid_points}}},
      {"binning", {{"variance_bins", c.binning.variance_bins}, {"gain_bins", c.binning.gain_bins}}},
      {"losses_db", c.losses_db},
      {"sigmas_over_a", c.sigmas_over_a},
      {"models", c.models},
      {"sweep", {{"r", c.sweep.r}, {"alpha_sq", c.sweep.alpha_sq}, {"phi", c.sweep.phi}}},
  };
}

namespace detail {

template <typename T>
void read_if(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

inline double read_angle(const nlohmann::json& v) {
  return v.is_string() ? parse::angle(v.get<std::string>()) : v.get<double>();
}

}  // namespace detail

/// Overlays the keys present in `j` onto `c`. Unknown keys are rejected.
inline void apply_json(const nlohmann::json& j, RunConfig& c) {
  static const std::vector<std::string> known = {
      "alpha0", "phi", "r", "eta_sq", "loss_db", "geometry", "atmosphere", "elliptic",
      "gain_mode", "arms", "fidelity_method", "samples", "seed", "grid", "binning",
      "losses_db", "sigmas_over_a", "models", "sweep", "workers"};
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  if (j.contains("alpha0")) {
    const auto& a = j.at("alpha0");
    c.alpha0 = a.is_string() ? parse::complex_number(a.get<std::string>())
                             : std::complex<double>(a.get<double>(), 0.0);
  }
  if (j.contains("phi")) c.phi = detail::read_angle(j.at("phi"));
  detail::read_if(j, "r", c.r);
  detail::read_if(j, "eta_sq", c.eta_sq);
  detail::read_if(j, "loss_db", c.loss_db);
  if (j.contains("geometry")) {
    const auto& g = j.at("geometry");
    detail::read_if(g, "w0", c.geometry.w0);
    detail::read_if(g, "width", c.geometry.width);
    detail::read_if(g, "aperture", c.geometry.aperture);
  }
  if (j.contains("atmosphere")) {
    const auto& a = j.at("atmosphere");
    detail::read_if(a, "ground_cn2", c.atmosphere.ground_cn2);
    detail::read_if(a, "wind_speed", c.atmosphere.wind_speed);
    detail::read_if(a, "wavelength", c.atmosphere.wavelength);
    detail::read_if(a, "distance", c.atmosphere.distance);
  }
  if (j.contains("elliptic")) {
    const auto& e = j.at("elliptic");
    detail::read_if(e, "var_log_sq_width", c.elliptic.var_log_sq_width);
    detail::read_if(e, "corr", c.elliptic.corr);
    detail::read_if(e, "width_broadening", c.elliptic.width_broadening);
    if (e.contains("mean_log_sq_width")) {
      const auto& m = e.at("mean_log_sq_width");
      c.elliptic.mean_log_sq_width =
          m.is_null() ? std::nullopt : std::optional<double>(m.get<double>());
    }
  }
  if (j.contains("gain_mode")) c.gain_mode = gain_mode_from_string(j.at("gain_mode").get<std::string>());
  if (j.contains("arms")) c.arms = arm_mode_from_string(j.at("arms").get<std::string>());
  if (j.contains("fidelity_method")) {
    c.method = fidelity_method_from_string(j.at("fidelity_method").get<std::string>());
  }
  detail::read_if(j, "samples", c.samples);
  detail::read_if(j, "seed", c.seed);
  detail::read_if(j, "workers", c.workers);
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    if (g.contains("half_width")) {
      const auto& h = g.at("half_width");
      if (h.is_string() && h.get<std::string>() == "auto") {
        c.grid_half_width.reset();
      } else {
        c.grid_half_width = h.get<double>();
      }
    }
    detail::read_if(j.at("grid"), "points", c.grid_points);
  }
  if (j.contains("binning")) {
    detail::read_if(j.at("binning"), "variance_bins", c.binning.variance_bins);
    detail::read_if(j.at("binning"), "gain_bins", c.binning.gain_bins);
  }
  detail::read_if(j, "losses_db", c.losses_db);
  detail::read_if(j, "sigmas_over_a", c.sigmas_over_a);
  detail::read_if(j, "models", c.models);
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    detail::read_if(s, "r", c.sweep.r);
    detail::read_if(s, "alpha_sq", c.sweep.alpha_sq);
    if (s.contains("phi")) {
      c.sweep.phi.clear();
      for (const auto& v : s.at("phi")) c.sweep.phi.push_back(detail::read_angle(v));
    }
  }
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  return nlohmann::json::parse(in);
}

}  // namespace catlink
