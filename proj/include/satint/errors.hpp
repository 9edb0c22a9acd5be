#pragma once

#include <stdexcept>
#include <string>

namespace satint {

/// Malformed, missing or inconsistent user input (config files, matrix files).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A structural hypothesis of the closed-loop design does not hold.
class AssumptionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Solver failure: blow-up, non-convergent implicit stage, non-finite state.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace satint
