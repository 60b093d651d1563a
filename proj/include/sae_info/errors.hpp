#pragma once

#include <stdexcept>
#include <string>

namespace sae_info {

// Base of every error raised by the library. The CLI maps ConfigError to
// exit code 2 and everything else to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed file header (bad magic, wrong dimension count).
class FormatError : public Error {
 public:
  using Error::Error;
};

// File payload shorter than its header declares.
class LengthError : public Error {
 public:
  using Error::Error;
};

// Invalid user-supplied configuration or precondition on arguments.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Non-finite or otherwise unusable input data.
class DataError : public Error {
 public:
  using Error::Error;
};

// Incompatible matrix or batch shapes.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Numerical breakdown, e.g. an eigenvalue well below zero.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// SGD produced a non-finite loss.
class TrainingError : public Error {
 public:
  TrainingError(const std::string& what, long iteration)
      : Error(what), iteration_(iteration) {}
  long iteration() const { return iteration_; }

 private:
  long iteration_;
};

// I/O failure on a named file.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace sae_info
