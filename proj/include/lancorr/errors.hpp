#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lancorr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Autoregressive coefficients that do not describe a stationary process.
class StationarityError : public Error {
 public:
  using Error::Error;
};

/// Singular or rank-deficient regression design.
class DegenerateDesignError : public Error {
 public:
  using Error::Error;
};

/// Test statistic cannot be standardized because the variance estimate is 0.
class DegenerateVarianceError : public Error {
 public:
  using Error::Error;
};

/// A data source cannot supply the number of observations requested.
class InsufficientDataError : public Error {
 public:
  InsufficientDataError(std::size_t required, std::size_t available)
      : Error("insufficient data: need " + std::to_string(required) +
              " observations, source has " + std::to_string(available)),
        required_(required),
        available_(available) {}

  std::size_t required() const noexcept { return required_; }
  std::size_t available() const noexcept { return available_; }

 private:
  std::size_t required_;
  std::size_t available_;
};

/// Non-vanishing gradient condition violated by a central-sequence correction.
class ConditionViolation : public Error {
 public:
  using Error::Error;
};

/// Numerical procedure failed (quadrature non-convergence, invalid scale, ...).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Monte Carlo experiment could not produce a trustworthy result.
class ExperimentError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration text. line() is 1-based; 0 means "not tied to a line".
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace lancorr
