#pragma once

#include <stdexcept>
#include <string>

namespace narrative {

// Inputs that parse but violate a structural contract (row sums, table sizes).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operation requires a graph property the argument lacks (e.g. perfection).
class UnsupportedStructure : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Scenario/report configuration problems; `field` names the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error(field.empty() ? what : field + ": " + what),
        field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace narrative
