#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qbgk {

// Base class for every error raised by the solver library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the domain of a function (e.g. boson integral with c < 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Target value outside the range of a monotone map (beta_inverse).
class RangeError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// Local equilibrium would be condensed (bosons) or saturated (fermions).
class RegimeError : public Error {
 public:
  using Error::Error;
};

class InvariantError : public Error {
 public:
  using Error::Error;
};

class GridMismatchError : public Error {
 public:
  using Error::Error;
};

// A 1/|p1|-weighted boundary integral is not numerically finite on the grid.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error("invalid value for '" + field + "': " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error("parse error at line " + std::to_string(line) + ", column " +
              std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace qbgk
