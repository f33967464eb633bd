#pragma once

#include <stdexcept>
#include <string>

namespace dirlab {

// Input or precondition violation. The CLI maps these to exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the domain of a function (t < t0, s < s0, ...).
class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DimensionTooLarge : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Enumeration or search exceeded its configured budget. The CLI maps these
// to exit code 2.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CapExceeded : public BudgetError {
 public:
  using BudgetError::BudgetError;
};

// Floating point could not certify a step (bisection bracket lost, reduction
// failed to converge). Signals bad input rather than randomness.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dirlab
