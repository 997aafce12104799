#pragma once

#include <stdexcept>
#include <string>

namespace chetaev {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand dimensions do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A NaN or Inf reached a container that requires finite entries.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// Tie value for a sign selection lies outside [-1, 1].
class InvalidSelectionError : public Error {
 public:
  using Error::Error;
};

/// A local formula was evaluated outside the neighborhood where it holds.
class OutOfNeighborhoodError : public Error {
 public:
  using Error::Error;
};

/// Problem data violates the preconditions of a spurious-minimum construction.
class ConstructionError : public Error {
 public:
  using Error::Error;
};

/// A trajectory or report does not belong to the problem it is checked against.
class MismatchError : public Error {
 public:
  using Error::Error;
};

/// CSV or report text could not be parsed.
class MalformedInputError : public Error {
 public:
  using Error::Error;
};

/// Experiment configuration is invalid or incomplete.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Filesystem read or write failed.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace chetaev
