#pragma once

#include <stdexcept>
#include <string>

namespace modgon {

// Malformed input: bad tokens, non-coprime generators, wrong model shape.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Prime divides the level or is not listed as good for the model.
class BadPrimeError : public InputError {
 public:
  using InputError::InputError;
};

// A reduction or a point at which the Jacobian criterion fails.
class SingularError : public InputError {
 public:
  using InputError::InputError;
};

// A computation would exceed its configured enumeration budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Facts that force some interval lower bound above its upper bound.
class InconsistentFacts : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace modgon
