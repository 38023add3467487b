#pragma once

#include <stdexcept>
#include <string>

namespace interfall {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (t' <= t, non-finite input, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure produced a non-finite value or failed to converge.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// A sampling grid does not cover the region that carries the probability.
class CoverageError : public Error {
 public:
  using Error::Error;
};

/// Two sampled objects that must share a grid do not.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A physical invariant that the code asserts at runtime was violated.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment or evolution configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The operation is defined only for a subset of states (e.g. pure states).
class UnsupportedState : public Error {
 public:
  using Error::Error;
};

/// A spatial filter transmits no probability.
class FilterBlocked : public Error {
 public:
  using Error::Error;
};

/// Too few local extrema to define a fringe visibility.
class VisibilityUndefined : public Error {
 public:
  using Error::Error;
};

}  // namespace interfall
