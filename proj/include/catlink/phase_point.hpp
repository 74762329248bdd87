#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace catlink {

/// Quadrature pair (x, p); equivalently the complex amplitude x + i p.
struct PhasePoint {
  double x = 0.0;
  double p = 0.0;

  [[nodiscard]] std::complex<double> amplitude() const { return {x, p}; }
  [[nodiscard]] double norm_sq() const { return x * x + p * p; }
};

/// Isotropic Gaussian (1/(pi V)) exp(-(x^2 + p^2)/V), the teleportation noise.
class GaussianKernel {
 public:
  explicit GaussianKernel(double variance) : variance_(variance) {
    if (!(variance > 0.0) || !std::isfinite(variance)) {
      throw std::domain_error("GaussianKernel: variance must be positive");
    }
  }

  [[nodiscard]] double variance() const { return variance_; }

 private:
  double variance_;
};

inline double gaussian_value(const GaussianKernel& kernel, PhasePoint point) {
  const double v = kernel.variance();
  return std::exp(-point.norm_sq() / v) / (std::numbers::pi * v);
}

}  // namespace catlink
