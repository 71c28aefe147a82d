#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace circlecomm {

/// Base of all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input document. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// The input is well formed but the requested computation has no answer
/// (edgeless graph, degenerate probabilities, ...).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

}  // namespace circlecomm
