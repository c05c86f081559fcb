#pragma once

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace transverse {

// Every error carries the module it originated from so that the CLI can
// report "[wave_solver] ..." style messages.
class Error : public std::runtime_error {
public:
  Error(std::string module, const std::string& what)
      : std::runtime_error("[" + module + "] " + what), module_(std::move(module)) {}

  const std::string& module() const noexcept { return module_; }

private:
  std::string module_;
};

class ParameterError : public Error {
public:
  using Error::Error;
};

class BasisError : public Error {
public:
  using Error::Error;
};

class ConvergenceError : public Error {
public:
  ConvergenceError(std::string module, const std::string& what, Eigen::VectorXd last_iterate,
                   double gradient_norm)
      : Error(std::move(module), what), last_iterate_(std::move(last_iterate)),
        gradient_norm_(gradient_norm) {}

  const Eigen::VectorXd& last_iterate() const noexcept { return last_iterate_; }
  double gradient_norm() const noexcept { return gradient_norm_; }

private:
  Eigen::VectorXd last_iterate_;
  double gradient_norm_;
};

class DegenerateSolutionError : public Error {
public:
  using Error::Error;
};

class InvalidMultiplierError : public Error {
public:
  using Error::Error;
};

class ReductionError : public Error {
public:
  using Error::Error;
};

class BasinError : public Error {
public:
  using Error::Error;
};

class SingularityError : public Error {
public:
  using Error::Error;
};

class NumericalConsistencyError : public Error {
public:
  using Error::Error;
};

class IntegratorError : public Error {
public:
  using Error::Error;
};

class FormatError : public Error {
public:
  using Error::Error;
};

}  // namespace transverse
