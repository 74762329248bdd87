#pragma once

// Teleportation map on sampled Wigner functions:
//   W_out(z) = (1/g^2) [W_in * G_V](z / g).
// The convolution multiplies the zero-padded spectrum by the Gaussian's exact
// transform exp(-V |q|^2 / 4); the rescale is absorbed into the output
// lattice, whose extents are the input extents times g.

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "catlink/errors.hpp"
#include "catlink/wigner_grid.hpp"

namespace catlink {

namespace detail {

// The FFTW planner is not re-entrant.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

template <typename T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <typename T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (p == nullptr) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

// Angular frequency of bin k for an n-point transform with spacing h.
inline double angular_frequency(std::size_t k, std::size_t n, double h) {
  const auto kk = static_cast<double>(k <= n / 2 ? static_cast<long long>(k)
                                                 : static_cast<long long>(k) -
                                                       static_cast<long long>(n));
  return 2.0 * std::numbers::pi * kk / (static_cast<double>(n) * h);
}

}  // namespace detail

/// [W * G_V] on the same lattice, via zero-padded transforms.
inline WignerGrid gaussian_convolve(const WignerGrid& input, double variance) {
  if (!(variance >= 0.0)) throw std::domain_error("gaussian_convolve: variance must be >= 0");
  const auto& s = input.spec();
  const std::size_t mx = 2 * s.n_x;
  const std::size_t mp = 2 * s.n_p;
  const std::size_t mpc = mp / 2 + 1;

  auto real = detail::fftw_buffer<double>(mx * mp);
  auto spec = detail::fftw_buffer<fftw_complex>(mx * mpc);
  for (std::size_t k = 0; k < mx * mp; ++k) real[k] = 0.0;
  for (std::size_t i = 0; i < s.n_x; ++i) {
    for (std::size_t j = 0; j < s.n_p; ++j) real[i * mp + j] = input.at(i, j);
  }

  fftw_plan fwd;
  fftw_plan inv;
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fwd = fftw_plan_dft_r2c_2d(static_cast<int>(mx), static_cast<int>(mp), real.get(), spec.get(),
                               FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_2d(static_cast<int>(mx), static_cast<int>(mp), spec.get(), real.get(),
                               FFTW_ESTIMATE);
  }
  fftw_execute(fwd);

  const double norm = 1.0 / static_cast<double>(mx * mp);
  for (std::size_t i = 0; i < mx; ++i) {
    const double qx = detail::angular_frequency(i, mx, s.dx());
    for (std::size_t j = 0; j < mpc; ++j) {
      const double qp = detail::angular_frequency(j, mp, s.dp());
      const double f = norm * std::exp(-0.25 * variance * (qx * qx + qp * qp));
      spec[i * mpc + j][0] *= f;
      spec[i * mpc + j][1] *= f;
    }
  }
  fftw_execute(inv);
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
  }

  WignerGrid out(s);
  for (std::size_t i = 0; i < s.n_x; ++i) {
    for (std::size_t j = 0; j < s.n_p; ++j) out.at(i, j) = real[i * mp + j];
  }
  return out;
}

/// Teleportation with gain g and noise variance V. The returned grid lives on
/// the g-scaled lattice. Throws TruncationError when the input does not decay
/// to `boundary_tolerance` at the lattice edge.
inline WignerGrid teleport_grid(const WignerGrid& input, double gain, double variance,
                                double boundary_tolerance = 1e-12) {
  if (!(gain > 0.0)) throw std::domain_error("teleport_grid: gain must be positive");
  if (!(variance > 0.0)) throw std::domain_error("teleport_grid: variance must be positive");
  const double edge = input.boundary_max();
  if (edge > boundary_tolerance) {
    std::ostringstream msg;
    msg << "teleport_grid: input reaches " << edge << " at the lattice boundary (limit "
        << boundary_tolerance << "); enlarge the grid";
    throw TruncationError(msg.str());
  }
  WignerGrid conv = gaussian_convolve(input, variance);
  const double inv_g2 = 1.0 / (gain * gain);
  std::vector<double> values(conv.values().begin(), conv.values().end());
  for (double& v : values) v *= inv_g2;
  return WignerGrid(input.spec().scaled(gain), std::move(values));
}

}  // namespace catlink
