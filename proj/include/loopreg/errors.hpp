#pragma once

#include <stdexcept>
#include <string>

namespace loopreg {

/// Bad construction parameters (grid size not a power of two, malformed config).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Input file or JSON document does not match the documented format.
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Loop leaves the punctured plane numerically: min |z| fell below the
/// collision floor.
struct CollisionError : std::runtime_error {
  explicit CollisionError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Lift samples do not describe an orientation-preserving diffeomorphism:
/// the slope of the lift dips below the monotonicity floor.
struct NotADiffeoError : std::runtime_error {
  explicit NotADiffeoError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Grid too coarse for the requested computation (argument tracking saw a
/// near-half-turn step between adjacent samples).
struct ResolutionError : std::runtime_error {
  explicit ResolutionError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Iterative solver failed to reach its tolerance.
struct ConvergenceError : std::runtime_error {
  explicit ConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace loopreg
