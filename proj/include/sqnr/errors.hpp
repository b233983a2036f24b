#pragma once

#include <stdexcept>
#include <string>

namespace sqnr {

// Precondition violations: bad indices, mismatched spaces, non-physical rates.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Parameters outside the model's validity (beta >= 1).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Solver failures: singular systems, step-size underflow, tolerance breaches.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sqnr
