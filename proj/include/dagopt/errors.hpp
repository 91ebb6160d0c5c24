#pragma once

#include <stdexcept>
#include <string>

namespace dagopt {

// Bad argument: wrong dimensions, non-finite entries, out-of-range settings.
struct InvalidInputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// An evaluation would overflow double precision. The message names the
// offending quantity so callers can report it.
struct NumericOverflowError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Filesystem / parse failures, with the path in the message.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed configuration; `field` names the entry that failed.
struct ConfigError : std::runtime_error {
  ConfigError(std::string field_name, const std::string& what)
      : std::runtime_error("config field '" + field_name + "': " + what),
        field(std::move(field_name)) {}
  std::string field;
};

}  // namespace dagopt
