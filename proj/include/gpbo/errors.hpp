#pragma once

#include <stdexcept>
#include <string>

namespace gpbo {

/// Bad user input: malformed config, infeasible parameter values, wrong shapes.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Unknown names or inconsistent options in a configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Study bookkeeping violations (unknown trial id, double completion, ...).
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Numerical failure inside the GP (e.g. Cholesky failed at maximum jitter).
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gpbo
