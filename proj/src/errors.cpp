#include "ccasgnn/errors.hpp"

#include <sstream>

namespace ccasgnn {
namespace {

std::string join_issues(const std::vector<std::string>& issues) {
  std::ostringstream os;
  os << "invalid configuration";
  for (const auto& issue : issues) os << "\n  - " << issue;
  return os.str();
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& what)
    : DataError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

}  // namespace ccasgnn
