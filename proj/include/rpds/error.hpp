#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rpds {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition (arity mismatch, index out of
/// range, composability guard not met, improper ID, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A configured budget (k bound, node limit, annotator states, ...) was hit.
class ResourceError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input. Carries a 1-based line and column when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : Error(format(what, line, column)), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& what, std::size_t line, std::size_t column) {
    if (line == 0) return what;
    std::string pos = std::to_string(line);
    if (column != 0) pos += ":" + std::to_string(column);
    return pos + ": " + what;
  }

  std::size_t line_;
  std::size_t column_;
};

}  // namespace rpds
