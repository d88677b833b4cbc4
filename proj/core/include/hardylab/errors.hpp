#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hardylab {

// Base class for everything thrown on purpose by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed expression text. `position` is a 0-based byte offset into the input.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t position)
      : Error(what + " (at offset " + std::to_string(position) + ")"),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

private:
  std::size_t position_;
};

// Input outside the mathematical domain: nonpositive sample values,
// fractional pair weights, an infinite constant requested as a number.
class DomainError : public Error {
public:
  using Error::Error;
};

// Evaluation failed numerically. `exponent` records the power that overflowed,
// NaN when not applicable.
class EvalError : public Error {
public:
  explicit EvalError(const std::string& what, double exponent)
      : Error(what), exponent_(exponent) {}

  double exponent() const noexcept { return exponent_; }

private:
  double exponent_;
};

}  // namespace hardylab
