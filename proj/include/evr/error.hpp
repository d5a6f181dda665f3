#pragma once

#include <stdexcept>
#include <string>

namespace evr {

/// Base for every error raised by the library. The CLI maps subclasses to
/// exit codes: NumericalError -> 3, everything else -> 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Malformed or truncated file content.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf produced during computation (e.g. a diverging training run).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace evr
