#pragma once

#include <stdexcept>
#include <string>

namespace hpf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed caller input: mismatched dimensions or bases, bad specs,
/// unparseable files. The CLI maps these to exit code 1.
class InputError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public InputError {
 public:
  using InputError::InputError;
};

class BasisError : public InputError {
 public:
  using InputError::InputError;
};

/// A smoothing operator failed the positivity condition on <Ah, BAh>.
class PositivityError : public InputError {
 public:
  using InputError::InputError;
};

/// A covariance that must be inverted is singular on the relevant subspace.
class SingularCovarianceError : public InputError {
 public:
  using InputError::InputError;
};

/// Numerical failure that valid input should never produce.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace hpf
