#pragma once

#include <stdexcept>
#include <string>

namespace tsleak {

// Base for every error raised by the library. The CLI maps the concrete
// subclass to its exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or insufficient input data (bad CSV rows, empty partitions, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

// Invalid parameters or configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Non-finite values during training or inference.
class NumericError : public Error {
 public:
  using Error::Error;
};

// A clean-mode split audited as contaminated. Should never happen; the runner
// treats it as a hard failure.
class ContaminationError : public Error {
 public:
  using Error::Error;
};

}  // namespace tsleak
