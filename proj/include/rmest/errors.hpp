#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rmest {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function (x < 0, y >= phi_inf, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// (1 - rho) * phi_inf * c >= 1: the regularized fixed point is not well defined.
class AdmissibilityError : public Error {
 public:
  using Error::Error;
};

/// Inputs violate the regime a routine is valid in (c >= 1 without shrinkage, phi_inf <= 1, ...).
class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

/// An iterative solver hit its iteration cap.
class NonConvergence : public Error {
 public:
  NonConvergence(const std::string& what, int iterations, double residual);

  int iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  int iterations_;
  double residual_;
};

/// A fixed-point iterate lost positive definiteness.
class SingularIterate : public Error {
 public:
  using Error::Error;
};

/// Derivative requested exactly at the non-differentiable point of the Huber weight.
class KinkError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input. `line()` is 1-based; 0 when not attributable to a line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line);

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace rmest
