#pragma once

#include <stdexcept>
#include <string>

namespace s2k {

// Base class for every error thrown by the library. The CLI maps
// InvalidArgument to exit code 2 (usage) and every other Error to 3
// (data); anything else escaping the library is a bug.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A file could not be decoded (unsupported PNG layout, bad magic, ...).
struct DecodeError : Error {
  using Error::Error;
};

// A tensor container file is structurally malformed (truncated, bad
// magic, inconsistent sizes).
struct FormatError : Error {
  using Error::Error;
};

// Caller violated a documented precondition (shape mismatch, bad range).
struct InvalidArgument : Error {
  using Error::Error;
};

// An estimator produced a degenerate or out-of-model result.
struct EstimationError : Error {
  using Error::Error;
};

// Dataset-level problems: missing manifest, unreadable sample, ...
struct DataError : Error {
  using Error::Error;
};

}  // namespace s2k
