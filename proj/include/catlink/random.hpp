#pragma once

// Counter-based random streams. Every Monte Carlo draw is addressed by
// (seed, stream, index); the stream's starting state is a hash of that key,
// so results do not depend on how samples are distributed over workers.
//
// The generator is SplitMix64 (the output function of Java's
// SplittableRandom). Normal variates use Box-Muller so the sequence is the
// same on every standard library.

#include <cmath>
#include <cstdint>
#include <numbers>

namespace catlink {

namespace detail {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace detail

class RandomStream {
 public:
  constexpr explicit RandomStream(std::uint64_t state) : state_(state) {}

  /// Independent stream for sample `index` of logical stream `stream`.
  static constexpr RandomStream for_sample(std::uint64_t seed, std::uint64_t stream,
                                           std::uint64_t index) {
    std::uint64_t key = detail::mix64(seed + detail::kGolden);
    key = detail::mix64(key ^ (stream * 0xD1B54A32D192ED03ULL + 1));
    key = detail::mix64(key ^ (index * detail::kGolden + 0x632BE59BD9B4E019ULL));
    return RandomStream(key);
  }

  constexpr std::uint64_t next_u64() {
    state_ += detail::kGolden;
    return detail::mix64(state_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  constexpr double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal variate.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace catlink
