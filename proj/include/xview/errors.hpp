#pragma once

#include <stdexcept>
#include <string>

namespace xview {

/// Malformed input data: wrong record size, non-finite payload, unparsable JSON.
struct FormatError : std::runtime_error {
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

/// Input parsed but violates a schema or physical invariant; the message carries the
/// offending field path.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// An internal consistency check failed (e.g. serial and parallel runs disagree).
struct SelfCheckError : std::runtime_error {
  explicit SelfCheckError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace xview
