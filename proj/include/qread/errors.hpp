#pragma once

#include <stdexcept>
#include <string>

namespace qread {

/// A parameter lies outside the domain of the operation (negative energy,
/// reflectivity outside [0,1], t outside (0,1), ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A matrix or density operator fails a physicality check.
class InvalidStateError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An iterative routine did not converge, or a quantity is numerically
/// undefined (singular matrix, truncation too coarse).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qread
