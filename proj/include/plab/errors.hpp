#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace plab {

// Each failure family maps to its own CLI exit status (see tools/plab.cpp).

class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericalBudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ParseError : public std::runtime_error {
 public:
  // column is 1-based
  ParseError(const std::string& message, std::size_t column)
      : std::runtime_error(message + " (column " + std::to_string(column) + ")"),
        column_(column) {}
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t column_;
};

inline double require_finite(double x, const char* what) {
  if (!std::isfinite(x))
    throw PreconditionError(std::string(what) + ": non-finite input");
  return x;
}

}  // namespace plab
