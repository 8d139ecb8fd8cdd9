#pragma once

#include <stdexcept>
#include <string>

namespace mfg {

// Raised for malformed inputs: bad grids, invalid model parameters, schema
// violations in run configs.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a computation produces non-finite values or leaves its
// admissible regime (negative mass blow-up, vanishing Hopf-Cole variable).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mfg
