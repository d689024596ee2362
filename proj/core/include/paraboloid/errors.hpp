#pragma once

#include <stdexcept>
#include <string>

namespace paraboloid {

/// A caller violated an operation's precondition (bad exponent, bad box,
/// dimension mismatch, sharp cutoff where a smooth one is required, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The requested object would not fit in addressable memory or exceeds a
/// configured work budget.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// A numerical procedure did not reach its stated tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computed object failed a structural identity it must satisfy.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace paraboloid
