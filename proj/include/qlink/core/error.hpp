#pragma once

#include <stdexcept>
#include <string>

namespace qlink {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operator or state dimensions do not fit together.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A value violates a documented invariant or precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Query outside a calibrated or tabulated range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// ODE integration failed (step underflow, too many steps).
class IntegrationError : public Error {
 public:
  using Error::Error;
};

/// A numerical fit or optimisation did not converge.
class FitError : public Error {
 public:
  using Error::Error;
};

}  // namespace qlink
