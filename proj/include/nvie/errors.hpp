#pragma once

#include <stdexcept>
#include <string>

namespace nvie {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluation at a point where the quantity is undefined (coincident points,
/// points outside a reference domain, Hankel functions at zero, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

class UnsupportedShapeError : public Error {
 public:
  using Error::Error;
};

class InvalidOrderError : public Error {
 public:
  using Error::Error;
};

/// An exclusion ball or evaluation point violates the element geometry.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// A self-certifying quadrature did not reach its tolerance.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual, int iterations)
      : Error(what), residual_(residual), iterations_(iterations) {}
  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

/// Vanishing denominator in an analytic series (resonance).
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

}  // namespace nvie
