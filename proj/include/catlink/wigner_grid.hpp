#pragma once

// Sampled Wigner functions on rectangular phase-space lattices.
//
// A lattice with n points over [min, max) has step (max - min)/n and nodes
// min + i*step, so a symmetric extent puts a node exactly on the origin.
// Values are stored row-major with x as the slow index.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "catlink/cat_state.hpp"
#include "catlink/errors.hpp"
#include "catlink/gaussian_mixture.hpp"
#include "catlink/phase_point.hpp"

namespace catlink {

struct GridSpec {
  double x_min = -8.0;
  double x_max = 8.0;
  double p_min = -8.0;
  double p_max = 8.0;
  std::size_t n_x = 512;
  std::size_t n_p = 512;

  [[nodiscard]] double dx() const { return (x_max - x_min) / static_cast<double>(n_x); }
  [[nodiscard]] double dp() const { return (p_max - p_min) / static_cast<double>(n_p); }
  [[nodiscard]] double x(std::size_t i) const { return x_min + static_cast<double>(i) * dx(); }
  [[nodiscard]] double p(std::size_t j) const { return p_min + static_cast<double>(j) * dp(); }
  [[nodiscard]] std::size_t size() const { return n_x * n_p; }

  /// Symmetric square lattice [-half_width, half_width)^2.
  static GridSpec square(double half_width, std::size_t n) {
    return {-half_width, half_width, -half_width, half_width, n, n};
  }

  /// Default 512^2 lattice over [-8, 8)^2, widened so that the lobes of a cat
  /// with large |alpha0| still decay to the lattice edge.
  static GridSpec for_cat(const CatState& cat, std::size_t n = 512) {
    return square(std::max(8.0, std::abs(cat.alpha0()) + 6.5), n);
  }

  void validate() const {
    auto pow2 = [](std::size_t n) { return n >= 2 && (n & (n - 1)) == 0; };
    if (!pow2(n_x) || !pow2(n_p)) {
      throw std::invalid_argument("GridSpec: point counts must be powers of two >= 2");
    }
    if (!(x_max > x_min) || !(p_max > p_min) || !std::isfinite(x_min) || !std::isfinite(x_max) ||
        !std::isfinite(p_min) || !std::isfinite(p_max)) {
      throw std::invalid_argument("GridSpec: invalid extents");
    }
  }

  [[nodiscard]] bool same_lattice(const GridSpec& o) const {
    auto close = [](double a, double b) {
      return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
    };
    return n_x == o.n_x && n_p == o.n_p && close(x_min, o.x_min) && close(x_max, o.x_max) &&
           close(p_min, o.p_min) && close(p_max, o.p_max);
  }

  [[nodiscard]] GridSpec scaled(double g) const {
    return {g * x_min, g * x_max, g * p_min, g * p_max, n_x, n_p};
  }
};

class WignerGrid {
 public:
  explicit WignerGrid(GridSpec spec) : spec_(spec) {
    spec_.validate();
    values_.assign(spec_.size(), 0.0);
  }

  WignerGrid(GridSpec spec, std::vector<double> values) : spec_(spec), values_(std::move(values)) {
    spec_.validate();
    if (values_.size() != spec_.size()) throw ShapeError("WignerGrid: value count mismatch");
  }

  template <typename F>
  static WignerGrid sample(GridSpec spec, F&& f) {
    WignerGrid g(spec);
    for (std::size_t i = 0; i < spec.n_x; ++i) {
      for (std::size_t j = 0; j < spec.n_p; ++j) g.at(i, j) = f(PhasePoint{spec.x(i), spec.p(j)});
    }
    return g;
  }

  /// Separable evaluation: each term is an outer product of two 1-D factors.
  static WignerGrid sample(GridSpec spec, const GaussianMixture& w) {
    WignerGrid g(spec);
    std::vector<std::complex<double>> fx(spec.n_x);
    std::vector<std::complex<double>> fp(spec.n_p);
    for (const auto& t : w.terms()) {
      for (std::size_t i = 0; i < spec.n_x; ++i) {
        const auto d = spec.x(i) - t.cx;
        fx[i] = t.weight * std::exp(-d * d / t.width);
      }
      for (std::size_t j = 0; j < spec.n_p; ++j) {
        const auto d = spec.p(j) - t.cp;
        fp[j] = std::exp(-d * d / t.width);
      }
      for (std::size_t i = 0; i < spec.n_x; ++i) {
        double* row = &g.values_[i * spec.n_p];
        const auto a = fx[i];
        for (std::size_t j = 0; j < spec.n_p; ++j) {
          row[j] += a.real() * fp[j].real() - a.imag() * fp[j].imag();
        }
      }
    }
    return g;
  }

  [[nodiscard]] const GridSpec& spec() const { return spec_; }
  [[nodiscard]] std::span<const double> values() const { return values_; }
  [[nodiscard]] std::span<double> values() { return values_; }

  [[nodiscard]] double& at(std::size_t i, std::size_t j) { return values_[i * spec_.n_p + j]; }
  [[nodiscard]] double at(std::size_t i, std::size_t j) const {
    return values_[i * spec_.n_p + j];
  }

  /// Riemann sum of W dx dp.
  [[nodiscard]] double integral() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s * spec_.dx() * spec_.dp();
  }

  /// Largest |W| on the outermost ring of lattice nodes.
  [[nodiscard]] double boundary_max() const {
    double m = 0.0;
    const std::size_t nx = spec_.n_x;
    const std::size_t np = spec_.n_p;
    for (std::size_t i = 0; i < nx; ++i) {
      m = std::max({m, std::abs(at(i, 0)), std::abs(at(i, np - 1))});
    }
    for (std::size_t j = 0; j < np; ++j) {
      m = std::max({m, std::abs(at(0, j)), std::abs(at(nx - 1, j))});
    }
    return m;
  }

  /// Bicubic (Keys, a = -1/2) interpolation; the function is zero off-lattice.
  [[nodiscard]] double interpolate(PhasePoint z) const {
    const double fx = (z.x - spec_.x_min) / spec_.dx();
    const double fp = (z.p - spec_.p_min) / spec_.dp();
    const double ix = std::floor(fx);
    const double ip = std::floor(fp);
    const auto wx = cubic_weights(fx - ix);
    const auto wp = cubic_weights(fp - ip);
    double sum = 0.0;
    for (int a = 0; a < 4; ++a) {
      const double ii = ix - 1 + a;
      if (ii < 0 || ii >= static_cast<double>(spec_.n_x)) continue;
      double row = 0.0;
      for (int b = 0; b < 4; ++b) {
        const double jj = ip - 1 + b;
        if (jj < 0 || jj >= static_cast<double>(spec_.n_p)) continue;
        row += wp[b] * at(static_cast<std::size_t>(ii), static_cast<std::size_t>(jj));
      }
      sum += wx[a] * row;
    }
    return sum;
  }

  [[nodiscard]] WignerGrid resampled(const GridSpec& target) const {
    return sample(target, [this](PhasePoint z) { return interpolate(z); });
  }

 private:
  static std::array<double, 4> cubic_weights(double t) {
    constexpr double a = -0.5;
    auto near = [](double s) { return ((a + 2.0) * s - (a + 3.0)) * s * s + 1.0; };
    auto far = [](double s) { return ((a * s - 5.0 * a) * s + 8.0 * a) * s - 4.0 * a; };
    return {far(1.0 + t), near(t), near(1.0 - t), far(2.0 - t)};
  }

  GridSpec spec_;
  std::vector<double> values_;
};

/// F = pi * sum a b dx dp on a shared lattice.
inline double fidelity_overlap(const WignerGrid& a, const WignerGrid& b) {
  if (!a.spec().same_lattice(b.spec())) throw ShapeError("fidelity_overlap: lattices differ");
  const auto va = a.values();
  const auto vb = b.values();
  double s = 0.0;
  for (std::size_t k = 0; k < va.size(); ++k) s += va[k] * vb[k];
  return std::numbers::pi * s * a.spec().dx() * a.spec().dp();
}

/// pi * sum W_grid W_mixture dx dp over the lattice of `grid`, without
/// materializing the mixture: each separable term reduces to a matrix-vector
/// product with the sampled values.
inline double lattice_overlap(const WignerGrid& grid, const GaussianMixture& w) {
  const auto& s = grid.spec();
  std::vector<double> fp_re(s.n_p);
  std::vector<double> fp_im(s.n_p);
  std::complex<double> total{0.0, 0.0};
  for (const auto& t : w.terms()) {
    for (std::size_t j = 0; j < s.n_p; ++j) {
      const auto d = s.p(j) - t.cp;
      const auto f = std::exp(-d * d / t.width);
      fp_re[j] = f.real();
      fp_im[j] = f.imag();
    }
    std::complex<double> term{0.0, 0.0};
    for (std::size_t i = 0; i < s.n_x; ++i) {
      const auto d = s.x(i) - t.cx;
      const auto fx = std::exp(-d * d / t.width);
      const double* row = &grid.values()[i * s.n_p];
      double re = 0.0;
      double im = 0.0;
      for (std::size_t j = 0; j < s.n_p; ++j) {
        re += row[j] * fp_re[j];
        im += row[j] * fp_im[j];
      }
      term += fx * std::complex<double>(re, im);
    }
    total += t.weight * term;
  }
  return std::numbers::pi * total.real() * s.dx() * s.dp();
}

namespace csv {

/// Shortest-round-trip-safe decimal: 17 significant digits, C locale.
inline std::string format_double(double v, int precision = 17) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::general,
                           precision);
  return {buf.data(), res.ptr};
}

}  // namespace csv

/// CSV with header `x,p,w`, row-major (x slow), 17 significant digits.
inline void write_csv(std::ostream& os, const WignerGrid& grid) {
  os << "x,p,w\n";
  const auto& s = grid.spec();
  for (std::size_t i = 0; i < s.n_x; ++i) {
    const std::string xs = csv::format_double(s.x(i));
    for (std::size_t j = 0; j < s.n_p; ++j) {
      os << xs << ',' << csv::format_double(s.p(j)) << ',' << csv::format_double(grid.at(i, j))
         << '\n';
    }
  }
}

}  // namespace catlink
