#pragma once

// Wigner functions written as the real part of a sum of complex-centred
// isotropic Gaussians,
//
//   W(x, p) = Re sum_k w_k exp(-((x - cx_k)^2 + (p - cp_k)^2) / s_k),
//
// with complex weights w_k and centres (cx_k, cp_k) and real widths s_k > 0.
// Coherent-state lobes have real centres; interference fringes
// exp(-|z|^2/s + i q.z) become a Gaussian with an imaginary centre shift.
// The family is closed under Gaussian convolution and phase-space rescaling,
// and overlaps have a closed form, which makes teleported cat states exact.

#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "catlink/phase_point.hpp"

namespace catlink {

struct GaussianTerm {
  std::complex<double> weight;
  std::complex<double> cx;
  std::complex<double> cp;
  double width;  // s in exp(-|z - c|^2 / s)
};

class GaussianMixture {
 public:
  GaussianMixture() = default;
  explicit GaussianMixture(std::vector<GaussianTerm> terms) : terms_(std::move(terms)) {}

  void add(const GaussianTerm& term) { terms_.push_back(term); }

  /// Adds Re[weight * exp(-|z - centre|^2/width + i (qx x + qp p))].
  void add_fringe(std::complex<double> weight, PhasePoint centre, double width, double qx,
                  double qp) {
    // exp(-|z-m|^2/s + i q.z) = exp(i q.m - s|q|^2/4) exp(-(z - m - i s q/2)^2 / s)
    const std::complex<double> phase{-0.25 * width * (qx * qx + qp * qp),
                                     qx * centre.x + qp * centre.p};
    terms_.push_back({weight * std::exp(phase),
                      {centre.x, 0.5 * width * qx},
                      {centre.p, 0.5 * width * qp},
                      width});
  }

  [[nodiscard]] std::span<const GaussianTerm> terms() const { return terms_; }
  [[nodiscard]] std::size_t size() const { return terms_.size(); }

  [[nodiscard]] double operator()(PhasePoint z) const {
    std::complex<double> sum{0.0, 0.0};
    for (const auto& t : terms_) {
      const auto dx = z.x - t.cx;
      const auto dp = z.p - t.cp;
      sum += t.weight * std::exp(-(dx * dx + dp * dp) / t.width);
    }
    return sum.real();
  }

  /// Integral of W over phase space.
  [[nodiscard]] double integral() const {
    std::complex<double> sum{0.0, 0.0};
    for (const auto& t : terms_) sum += t.weight * std::numbers::pi * t.width;
    return sum.real();
  }

  /// Convolution with (1/(pi V)) exp(-|z|^2/V).
  [[nodiscard]] GaussianMixture convolved(double variance) const {
    if (!(variance >= 0.0)) throw std::domain_error("convolved: variance must be >= 0");
    GaussianMixture out;
    out.terms_.reserve(terms_.size());
    for (const auto& t : terms_) {
      const double s = t.width + variance;
      out.terms_.push_back({t.weight * (t.width / s), t.cx, t.cp, s});
    }
    return out;
  }

  /// z -> (1/g^2) W(z/g).
  [[nodiscard]] GaussianMixture rescaled(double gain) const {
    if (!(gain > 0.0)) throw std::domain_error("rescaled: gain must be positive");
    GaussianMixture out;
    out.terms_.reserve(terms_.size());
    for (const auto& t : terms_) {
      out.terms_.push_back({t.weight / (gain * gain), gain * t.cx, gain * t.cp,
                            gain * gain * t.width});
    }
    return out;
  }

 private:
  std::vector<GaussianTerm> terms_;
};

namespace detail {

// Integral over the plane of exp(-|z-m1|^2/s1) exp(-|z-m2|^2/s2), complex centres.
inline std::complex<double> gaussian_product_integral(const GaussianTerm& a,
                                                      std::complex<double> bcx,
                                                      std::complex<double> bcp, double bs) {
  const double s = a.width + bs;
  const auto dx = a.cx - bcx;
  const auto dp = a.cp - bcp;
  return std::numbers::pi * a.width * bs / s * std::exp(-(dx * dx + dp * dp) / s);
}

}  // namespace detail

/// pi * integral of W_a W_b over phase space (state overlap Tr[rho_a rho_b]).
inline double mixture_overlap(const GaussianMixture& a, const GaussianMixture& b) {
  // Re(A) Re(B) = (A B + A conj(B)) / 2 termwise.
  std::complex<double> sum{0.0, 0.0};
  for (const auto& ta : a.terms()) {
    for (const auto& tb : b.terms()) {
      sum += ta.weight * tb.weight * detail::gaussian_product_integral(ta, tb.cx, tb.cp, tb.width);
      sum += ta.weight * std::conj(tb.weight) *
             detail::gaussian_product_integral(ta, std::conj(tb.cx), std::conj(tb.cp), tb.width);
    }
  }
  return 0.5 * std::numbers::pi * sum.real();
}

}  // namespace catlink
