#pragma once

#include <stdexcept>
#include <string>

namespace lpmhd {

/// Base of every error raised by the library. The CLI maps each subclass to
/// a distinct exit code (see ExitCode in experiments.hpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numeric argument violates an operation's precondition.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Input field is not Hermitian-symmetric (not the transform of a real field).
class SymmetryError : public Error {
 public:
  using Error::Error;
};

class GridMismatchError : public Error {
 public:
  using Error::Error;
};

/// Numerical procedure failed to converge or produced an undefined quantity.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class QuadratureError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A bound ratio had a vanishing denominator but a non-negligible numerator.
class DegenerateRatioError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Time step violates the advective stability limit.
class CflError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Configuration document or CLI flags failed validation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Checkpoint or constant-table file is malformed.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace lpmhd
