#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace linord {

// Base of every error the library reports on bad input.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Unbound variable, unknown relation, arity mismatch, oversized table.
class EvalError : public Error {
 public:
  using Error::Error;
};

// Bad OrdB configuration, structure description or catalog request.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// The order handed to the decoder is not one that build_ordb produces.
class DecodeError : public Error {
 public:
  using Error::Error;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace linord
