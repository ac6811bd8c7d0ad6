#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace benchdiag {

// Base for every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value violates a domain invariant (e.g. a nonpositive service time).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed input text. line() is 1-based; 0 when no single line is at fault.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// The data is valid but cannot support the requested estimate.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

}  // namespace benchdiag
