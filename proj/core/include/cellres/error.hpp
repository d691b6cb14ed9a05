#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cellres {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unknown catalogue identifier; the message lists the valid names.
class CatalogueError : public Error {
 public:
  using Error::Error;
};

/// A precondition on an argument or configuration was violated.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Moment system too ill-conditioned to trust the kernel coefficients.
class ConditioningError : public Error {
 public:
  ConditioningError(const std::string& what, double condition_estimate)
      : Error(what), condition_estimate_(condition_estimate) {}
  double condition_estimate() const noexcept { return condition_estimate_; }

 private:
  double condition_estimate_;
};

/// A quantity that must be positive/finite by construction was not.
class NumericalIntegrityError : public Error {
 public:
  using Error::Error;
};

/// The geometric expansion of the naive average does not converge at this size.
class ConvergenceConditionError : public Error {
 public:
  ConvergenceConditionError(const std::string& what, double threshold)
      : Error(what), threshold_(threshold) {}
  double threshold() const noexcept { return threshold_; }

 private:
  double threshold_;
};

/// Iterative solver hit its iteration cap.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, std::vector<double> history)
      : Error(what), history_(std::move(history)) {}
  const std::vector<double>& residual_history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

/// A curve does not cover the support [delta, 2 delta] of the scaled kernel.
class CoverageError : public Error {
 public:
  using Error::Error;
};

/// Not enough usable samples to fit a rate.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// A per-size evaluation inside a sweep failed.
class SweepError : public Error {
 public:
  SweepError(const std::string& what, double delta) : Error(what), delta_(delta) {}
  double delta() const noexcept { return delta_; }

 private:
  double delta_;
};

/// Malformed configuration file or unknown key.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line) : Error(what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace cellres
