#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rmnorm {

// Base for every runtime failure raised by the library. Precondition
// violations (bad sizes, non-positive tolerances) throw std::invalid_argument.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// A requested enumeration would be too large to materialize.
class SizeGuardError : public Error {
public:
  using Error::Error;
};

// An iterative method hit its iteration cap. Carries the best value seen.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& what, double best_estimate)
      : Error(what), best_estimate_(best_estimate) {}

  double best_estimate() const noexcept { return best_estimate_; }

private:
  double best_estimate_;
};

// The gauge sum never dropped to 1, so the Orlicz norm is infinite.
class UnboundedNormError : public Error {
public:
  using Error::Error;
};

// The tail integral of a random variable does not converge.
class DivergentIntegralError : public Error {
public:
  using Error::Error;
};

class RootFindError : public Error {
public:
  RootFindError(const std::string& what, double point) : Error(what), point_(point) {}

  double point() const noexcept { return point_; }

private:
  double point_;
};

// Malformed matrix file. Line and column are 1-based; column 0 means
// the position inside the line is unknown.
class ParseError : public Error {
public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

// Invalid experiment configuration (maps to CLI exit code 2).
class ConfigError : public Error {
public:
  using Error::Error;
};

} // namespace rmnorm
