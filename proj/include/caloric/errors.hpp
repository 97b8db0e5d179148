#pragma once

#include <stdexcept>
#include <string>

namespace caloric {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Adaptive quadrature failed to reach the requested tolerance.
class QuadratureError : public Error {
  public:
    QuadratureError(const std::string& what, double achieved_tolerance)
        : Error(what + " (achieved tolerance " + std::to_string(achieved_tolerance) + ")"),
          achieved_tolerance_(achieved_tolerance) {}

    double achieved_tolerance() const noexcept { return achieved_tolerance_; }

  private:
    double achieved_tolerance_;
};

/// A root was requested outside the range spanned by the bisection bracket.
class BracketError : public Error {
  public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
  public:
    using Error::Error;
};

/// A field was passed in the wrong (physical/frequency) representation.
class RepresentationError : public Error {
  public:
    using Error::Error;
};

/// A field carries energy the dyadic partition of its grid cannot resolve.
class ResolutionError : public Error {
  public:
    using Error::Error;
};

/// A multiplier or kernel is not resolved by the grid (Nyquist guard).
class AliasingError : public Error {
  public:
    using Error::Error;
};

/// The requested Bernstein function is outside the supported class.
class UnsupportedFunction : public Error {
  public:
    using Error::Error;
};

/// A multiplier or exponent evaluated to a non-finite value.
class NonFiniteError : public Error {
  public:
    using Error::Error;
};

}  // namespace caloric
