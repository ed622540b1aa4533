#pragma once

#include <stdexcept>
#include <string>

namespace tpk {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid input or parameters outside an operation's domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A computation could not be carried out on otherwise valid input.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Two distinct parameter values map to the same point.
class SelfIntersectionError : public NumericalError {
 public:
  SelfIntersectionError(const std::string& what, int i, int j)
      : NumericalError(what), first_(i), second_(j) {}
  int first() const noexcept { return first_; }
  int second() const noexcept { return second_; }

 private:
  int first_;
  int second_;
};

/// The tangent vanishes (or nearly so) somewhere on the curve.
class RegularityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Zero-length or otherwise collapsed geometry.
class DegenerateCurveError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Line search could not find an acceptable step.
class StallError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace tpk
