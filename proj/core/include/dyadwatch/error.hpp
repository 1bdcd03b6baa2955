#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dyadwatch {

// Every error raised by the library derives from Error so front-ends can map
// domain failures to a single exit path.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text. line() is 1-based; 0 when the error is not tied to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line)
      : Error(line == 0 ? message : "line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A value outside its variable's declared domain.
class DomainError : public Error {
 public:
  DomainError(const std::string& message, std::string variable, std::size_t line = 0)
      : Error(line == 0 ? message : "line " + std::to_string(line) + ": " + message),
        variable_(std::move(variable)),
        line_(line) {}
  const std::string& variable() const noexcept { return variable_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string variable_;
  std::size_t line_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class NotFoundError : public Error {
 public:
  using Error::Error;
};

}  // namespace dyadwatch
