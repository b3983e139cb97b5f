#pragma once

#include <stdexcept>
#include <string>

namespace deo {

/// Raised when an evaluation produced NaN/Inf. Carries the step index when
/// the failure happened inside an optimization loop (-1 otherwise).
class NumericFailure : public std::runtime_error {
 public:
  explicit NumericFailure(const std::string& what, long step = -1)
      : std::runtime_error(what), step_(step) {}
  long step() const { return step_; }

 private:
  long step_;
};

/// Raised when an iterative solver hit its sweep limit.
class ConvergenceFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid run configuration (maps to exit code 2 in the CLI).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace deo
