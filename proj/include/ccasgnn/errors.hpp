#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ccasgnn {

/// Incompatible operand shapes.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A precondition of an operation was not met by its caller.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Invalid configuration. Carries every violated field, not just the first.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> issues);
  const std::vector<std::string>& issues() const { return issues_; }

 private:
  std::vector<std::string> issues_;
};

/// Malformed or inconsistent input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public DataError {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public DataError {
 public:
  using DataError::DataError;
};

/// Non-finite values, singular systems and similar numerical breakdowns.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ccasgnn
