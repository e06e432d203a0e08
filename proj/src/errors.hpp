#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tpmhd {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Base for failures of the numerical machinery (linear or nonlinear solves).
class SolverError : public Error {
 public:
  using Error::Error;
};

class LinearSolveError : public SolverError {
 public:
  LinearSolveError(const std::string& what, double residual)
      : SolverError(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class NonConvergence : public SolverError {
 public:
  NonConvergence(const std::string& what, int iterations, double residual)
      : SolverError(what), iterations_(iterations), residual_(residual) {}
  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

#define TPMHD_REQUIRE(cond, ExceptionType, msg) \
  do {                                          \
    if (!(cond)) throw ExceptionType(msg);      \
  } while (0)

}  // namespace tpmhd
