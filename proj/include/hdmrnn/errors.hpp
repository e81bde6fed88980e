#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hdmrnn {

// Bad argument: wrong dimension, out-of-range index, non-finite value.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Cholesky factorization failed; the matrix is not numerically positive
// definite. A larger regularizer usually fixes it.
class ConditioningError : public std::runtime_error {
 public:
  ConditioningError(const std::string& what, std::size_t pivot)
      : std::runtime_error(what), pivot_(pivot) {}

  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

class UnsupportedDimension : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Malformed input file. line() is 1-based; 0 means "not line specific".
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace hdmrnn
