#pragma once

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>

namespace kpz {

/// Precondition violation on a scalar argument (non-positive step, zero size, ...).
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Shape mismatch between collaborating objects (modes vs basis, steps vs noise).
class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure: singular solve, quadrature that does not settle.
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a closed-form expression.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Operation requested on an operator that does not provide what it needs.
class UnsupportedOperator : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Operation applied to the wrong kind of object (Dirichlet row on an interior element).
class LogicError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// Inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

/// Regression on an empty or degenerate window.
class FitError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Hopf-Cole input that is not strictly positive.
class PositivityError : public std::domain_error {
public:
  PositivityError(std::size_t index, double value)
      : std::domain_error("non-positive value " + std::to_string(value) +
                          " at index " + std::to_string(index)),
        index_(index), value_(value) {}
  std::size_t index() const noexcept { return index_; }
  double value() const noexcept { return value_; }

private:
  std::size_t index_;
  double value_;
};

/// Fixed-point iteration that hit its cap.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(std::size_t step, std::size_t iterations, double last_error)
      : std::runtime_error("fixed point did not converge at step " + std::to_string(step) +
                           " after " + std::to_string(iterations) +
                           " iterations (relative change " + format_error(last_error) + ")"),
        step_(step), iterations_(iterations), last_error_(last_error) {}
  std::size_t step() const noexcept { return step_; }
  std::size_t iterations() const noexcept { return iterations_; }
  double last_error() const noexcept { return last_error_; }

private:
  static std::string format_error(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
  }
  std::size_t step_;
  std::size_t iterations_;
  double last_error_;
};

}  // namespace kpz
