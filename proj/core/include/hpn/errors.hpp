#pragma once

#include <stdexcept>
#include <string>

namespace hpn {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Tensor/volume extents do not line up.
struct DimensionError : Error {
  using Error::Error;
};

/// A caller violated an operation precondition.
struct ContractError : Error {
  using Error::Error;
};

/// A configuration value is unusable (CLI exit code 2).
struct ConfigError : Error {
  using Error::Error;
};

/// Filesystem failure (CLI exit code 3).
struct IoError : Error {
  using Error::Error;
};

/// Malformed file contents; carries the byte offset of the defect (CLI exit code 3).
struct FormatError : Error {
  FormatError(const std::string& what, long long byte_offset)
      : Error(what + " (byte offset " + std::to_string(byte_offset) + ")"),
        offset(byte_offset) {}
  long long offset;
};

}  // namespace hpn
