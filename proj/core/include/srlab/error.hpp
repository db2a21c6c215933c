#pragma once

#include <stdexcept>
#include <string>

namespace srlab {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or incompatible configuration (channel mismatch, bad sigma, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Tensor dimensions that do not satisfy an operation's precondition.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// File contents that cannot be parsed (bad magic, malformed header, unsupported format).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// File ended before the declared payload.
class TruncatedError : public FormatError {
 public:
  using FormatError::FormatError;
};

/// Checkpoint written by an incompatible format version.
class VersionError : public FormatError {
 public:
  using FormatError::FormatError;
};

/// Operating-system level failure (open, read, write, rename).
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace srlab
