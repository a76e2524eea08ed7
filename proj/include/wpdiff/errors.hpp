#pragma once

#include <stdexcept>
#include <string>

namespace wpdiff {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Invalid input: bad spec, malformed config, violated precondition.
class ConfigError : public Error {
public:
  using Error::Error;
};

// A computation could not produce a trustworthy number.
class NumericalError : public Error {
public:
  using Error::Error;
};

class OverflowError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

// Evaluation at (or numerically at) a pole or zero of a denominator.
class PoleError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class SingularPivotError : public NumericalError {
public:
  using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
public:
  ConvergenceError(const std::string& what, double achieved_delta)
      : NumericalError(what + " (achieved delta " + std::to_string(achieved_delta) + ")"),
        achieved_delta_(achieved_delta) {}

  double achieved_delta() const noexcept { return achieved_delta_; }

private:
  double achieved_delta_;
};

} // namespace wpdiff
