#pragma once

#include <stdexcept>
#include <string>

namespace blocksd {

/// Requested block count does not divide the vector (or time-grid) length.
class NonDivisibleError : public std::invalid_argument {
 public:
  NonDivisibleError(long total_len, long num_blocks)
      : std::invalid_argument("block count " + std::to_string(num_blocks) +
                              " does not divide length " +
                              std::to_string(total_len)) {}
};

/// The gradient vanished; the iterate is already a minimizer.
class ZeroGradientError : public std::runtime_error {
 public:
  ZeroGradientError() : std::runtime_error("gradient is zero; already converged") {}
};

/// The block Newton system stayed singular after the null-block drop and
/// one damped retry.
class SingularStepSystemError : public std::runtime_error {
 public:
  SingularStepSystemError() : std::runtime_error("step system is numerically singular") {}
};

/// A field or control does not match the discretization geometry.
class GeometryError : public std::runtime_error {
 public:
  explicit GeometryError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace blocksd
