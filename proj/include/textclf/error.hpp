#pragma once

#include <stdexcept>
#include <string>

namespace textclf {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user configuration: unknown keys, invalid option values, unsupported
/// requests (e.g. asking a tree for feature weights).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Input data that violates a documented precondition or cannot be parsed.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A persisted file carries a format version this build does not understand.
class VersionError : public DataError {
 public:
  using DataError::DataError;
};

/// A persisted file is truncated or structurally broken.
class CorruptFileError : public DataError {
 public:
  using DataError::DataError;
};

/// Raised when a model variant does not support the requested operation.
class UnsupportedVariantError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Internal consistency check failed; indicates a bug, not bad input.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace textclf
