#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace collab {

// Bad input data: malformed records, referential integrity, empty populations.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid options or configuration (thresholds, formats, generator settings).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A caller broke an operation's precondition.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// One rejected input line. Line numbers are 1-based.
struct RecordError {
  std::size_t line = 0;
  std::string message;

  std::string str() const { return "line " + std::to_string(line) + ": " + message; }
};

}  // namespace collab
