#pragma once

#include <stdexcept>
#include <string>

namespace neuropath {

// Base of every exception thrown by the library. The CLI maps the concrete
// type onto a process exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad arguments or flag values supplied by the caller.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Tensor or vector length does not match what a layer expects.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Neuron, layer or class index outside its valid range.
class IndexError : public Error {
 public:
  using Error::Error;
};

// Dataset content violates an invariant (label range, count mismatch, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

// File parses but its structure is not what the reader expects.
class FormatError : public Error {
 public:
  using Error::Error;
};

class UnsupportedVersionError : public FormatError {
 public:
  using FormatError::FormatError;
};

// A tensor file on disk disagrees with its manifest entry.
class CorruptModelError : public FormatError {
 public:
  using FormatError::FormatError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Non-finite values produced inside a numerical routine.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace neuropath
