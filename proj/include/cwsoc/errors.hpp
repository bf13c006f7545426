#pragma once

#include <stdexcept>
#include <string>

namespace cwsoc {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Point on or outside the boundary of a density's support.
class SupportError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Closed-form law requested for an order where none exists (n < 5).
class UnsupportedOrderError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical identity that must hold by construction did not.
class CheckFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cwsoc
