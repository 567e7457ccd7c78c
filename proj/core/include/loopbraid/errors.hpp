#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace loopbraid {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition violated by a caller-supplied argument.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Requested operator dimension exceeds the configured cap.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: non-convergence, inconsistent interpolation data.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class SingularMatrixError : public NumericalError {
 public:
  SingularMatrixError(const std::string& what, double pivot, double threshold)
      : NumericalError(what), pivot_(pivot), threshold_(threshold) {}

  double pivot() const noexcept { return pivot_; }
  double threshold() const noexcept { return threshold_; }

 private:
  double pivot_;
  double threshold_;
};

/// A closed-form prefactor hits a pole.
class PoleError : public NumericalError {
 public:
  PoleError(const std::string& what, std::string factor)
      : NumericalError(what), factor_(std::move(factor)) {}

  const std::string& factor() const noexcept { return factor_; }

 private:
  std::string factor_;
};

/// A B-operator failed one or more of its axioms.
class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, std::vector<std::string> failed)
      : Error(what), failed_(std::move(failed)) {}

  const std::vector<std::string>& failed_axioms() const noexcept { return failed_; }

 private:
  std::vector<std::string> failed_;
};

/// Malformed experiment configuration.  Carries the offending field path and,
/// when known, the 1-based source line.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::string field = {}, int line = -1)
      : Error(what), field_(std::move(field)), line_(line) {}

  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }

 private:
  std::string field_;
  int line_;
};

}  // namespace loopbraid
