#pragma once

#include <stdexcept>
#include <string>

namespace tmlab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class NotHermitian : public Error {
 public:
  using Error::Error;
};

/// Input is not positive definite / semidefinite within tolerance.
class NotPositive : public Error {
 public:
  using Error::Error;
};

/// A scalar function was evaluated outside its domain (non-finite result).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// range(X) is not contained in range(Y), so no c with X <= cY exists.
class DominationError : public Error {
 public:
  using Error::Error;
};

class UnsupportedFunction : public Error {
 public:
  using Error::Error;
};

/// Numeric inversion could not bracket the requested value.
class RangeError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace tmlab
