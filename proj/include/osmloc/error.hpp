#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace osmloc {

// Base class for all errors raised by the library.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input document (XML, binary container headers, ...).
struct ParseError : Error {
  ParseError(const std::string& msg, std::size_t byte_offset)
      : Error(msg + " (byte offset " + std::to_string(byte_offset) + ")"),
        offset(byte_offset) {}
  std::size_t offset;
};

// File container violates its format contract (magic, version, payload size).
struct FormatError : Error {
  using Error::Error;
};

// Structurally valid input carrying invalid values (NaN payload, bad class id).
struct DataError : Error {
  using Error::Error;
};

// A documented precondition or invariant does not hold.
struct InvariantError : Error {
  using Error::Error;
};

// Requested geometry lies outside the available map / raster coverage.
struct OutOfCoverageError : Error {
  using Error::Error;
};

// Bad configuration value, CLI usage, or manifest schema violation.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace osmloc
