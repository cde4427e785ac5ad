#pragma once

#include <stdexcept>
#include <string>

namespace salt {

// Error taxonomy mirrored by CLI exit codes:
//   ConfigError -> 2, DataError (and InputError) -> 3, anything else -> 4.

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed inputs to individual operations (bad file, empty sequence, ...).
class InputError : public DataError {
 public:
  explicit InputError(const std::string& what) : DataError(what) {}
};

// Invariant breaches that indicate a bug upstream, not a user mistake.
class InternalError : public std::logic_error {
 public:
  explicit InternalError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace salt
