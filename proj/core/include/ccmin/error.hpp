#pragma once

#include <stdexcept>
#include <string>

namespace ccmin {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied argument is outside its documented range.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Two fields (or a field and a problem) live on different grids, or the
/// grid kind does not support the requested operation.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// An energy or field evaluation produced NaN or infinity.
class NonFiniteValue : public Error {
 public:
  using Error::Error;
};

/// The input violates a structural precondition of an operation
/// (e.g. a dip that is not a dip, a plateau that does not fit).
class PreconditionViolated : public Error {
 public:
  using Error::Error;
};

}  // namespace ccmin
