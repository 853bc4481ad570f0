#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tpreg {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// A modelling assumption (e.g. sigma * s_I < 1) does not hold at the inputs.
class AssumptionViolation : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Invalid or inconsistent configuration. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data. Maps to CLI exit code 4.
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Iterative procedure failed to reach its tolerance. Maps to CLI exit code 3.
/// Carries the residuals observed at the last iterate.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& what,
                   std::vector<std::pair<std::string, double>> residuals = {})
      : std::runtime_error(what), residuals_(std::move(residuals)) {}

  const std::vector<std::pair<std::string, double>>& residuals() const noexcept {
    return residuals_;
  }

private:
  std::vector<std::pair<std::string, double>> residuals_;
};

/// Root search found no sign change on the search interval.
class BracketError : public ConvergenceError {
public:
  using ConvergenceError::ConvergenceError;
};

/// Price-regulation compliance cannot be met at any positive output.
class InfeasibleRegime : public ConvergenceError {
public:
  using ConvergenceError::ConvergenceError;
};

}  // namespace tpreg
