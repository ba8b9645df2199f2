#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stk {

// Malformed input text (bracket trees, DAG text, markup, manifests).
// `line` and `column` are 1-based; both are 0 when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : std::runtime_error(format(what, line, column)), line_(line), column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  static std::string format(const std::string& what, std::size_t line, std::size_t column) {
    if (line == 0) return what;
    return what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")";
  }

  std::size_t line_;
  std::size_t column_;
};

// Invalid run configuration (missing classes, bad flag combination, ...).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A generated model failed its own verification.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A closed-form bound is undefined for the given inputs (e.g. a zero denominator).
class DegenerateBoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace stk
