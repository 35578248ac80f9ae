#pragma once

#include <stdexcept>
#include <string>

namespace dlim {

/// Configuration / input errors. CLI maps these to exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failures (overflow, non-convergence, stalled samplers).
/// CLI maps these to exit code 3.
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace dlim
