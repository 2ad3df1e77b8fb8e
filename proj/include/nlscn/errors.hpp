#pragma once

#include <stdexcept>
#include <string>

namespace nlscn {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or inconsistent configuration (mesh extents, nesting, grid sizes).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A nonlinearity or potential that violates the model assumptions.
class ModelError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Zero or numerically singular pivot during sparse factorization.
class FactorizationError : public Error {
 public:
  using Error::Error;
};

/// An iteration hit its cap; `last_residual` is the residual at exit.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_residual)
      : Error(what), last_residual_(last_residual) {}
  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

/// Malformed or mismatched state file.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace nlscn
