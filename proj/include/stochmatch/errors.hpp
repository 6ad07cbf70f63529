#ifndef STOCHMATCH_ERRORS_HPP_
#define STOCHMATCH_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace stochmatch {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid model data or an operation applied to a model that does not
/// satisfy the operation's preconditions.
class ModelError : public Error {
 public:
  using Error::Error;
};

/// A configured resource cap (enumeration size, state count, ...) was hit.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

/// Scenario file could not be parsed as JSON.
class ScenarioParseError : public Error {
 public:
  ScenarioParseError(const std::string& message, int line, int column)
      : Error(message), line_(line), column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace stochmatch

#endif  // STOCHMATCH_ERRORS_HPP_
