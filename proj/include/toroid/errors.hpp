#pragma once

#include <stdexcept>
#include <string>

namespace toroid {

// Invalid scenario input: unknown keys, missing keys, bad units or ranges.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical method failed to meet its contract (non-convergence, drift).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace toroid
