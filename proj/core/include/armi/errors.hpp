// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace armi {

// Every error raised by the library derives from Error. The CLI maps the
// concrete type onto its exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape disagreement between operands.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf produced by an operation, or a check that requires finite inputs.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration or usage.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input data, including I/O failures.
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace armi
