#pragma once

#include <stdexcept>

namespace catlink {

/// A grid is too small for the state placed on it.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two grids that must share a lattice do not.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace catlink
