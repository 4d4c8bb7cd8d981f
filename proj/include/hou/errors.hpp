#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hou {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An application whose argument does not match the function's domain.
class IllTyped : public Error {
 public:
  using Error::Error;
};

class TypeMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidPosition : public Error {
 public:
  using Error::Error;
};

// Input violates an operation's structural precondition (e.g. not beta-normal).
class InvalidState : public Error {
 public:
  using Error::Error;
};

class IdempotenceViolation : public Error {
 public:
  using Error::Error;
};

// A file could not be read.
class IoError : public Error {
 public:
  using Error::Error;
};

class WorkBudgetExceeded : public Error {
 public:
  WorkBudgetExceeded() : Error("work budget exceeded") {}
};

// Malformed input text; line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& msg)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Undeclared, redeclared or ill-typed symbol.
class DeclError : public Error {
 public:
  DeclError(std::size_t line, std::size_t column, const std::string& msg)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace hou
