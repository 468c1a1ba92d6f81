#pragma once

#include <stdexcept>
#include <string>

namespace euler2c {

/// Input outside the domain where a formula or coordinate system is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The two bodies (or a body and a centre) coincide somewhere the formula needs
/// their distance.
class CollisionError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// An iteration failed to converge or a step size collapsed.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace euler2c
