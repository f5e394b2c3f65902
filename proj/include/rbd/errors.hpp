#pragma once

#include <stdexcept>
#include <string>

namespace rbd {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter or sampled coefficient lies outside its admissible domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Vector length or matrix size does not match the operator it is used with.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// The requested operation is not available for this input (e.g. exact
/// solutions missing, DST solve on a variable-coefficient operator).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent solver/experiment configuration, detected before any solve.
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// A linear solve could not be carried out (singular inner system, I/O).
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace rbd
