#pragma once

#include <stdexcept>
#include <string>

namespace curved3b {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain where a formula or ansatz is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A pair of bodies is at (or numerically too close to) a collision or,
/// for positive curvature, an antipodal configuration.
class SingularConfiguration : public Error {
 public:
  using Error::Error;
};

/// A vector cannot be rescaled onto the manifold.
class DegenerateVector : public Error {
 public:
  using Error::Error;
};

/// The step-size controller drove the step below its hard floor.
class StepUnderflow : public Error {
 public:
  using Error::Error;
};

/// classify() was asked about a point where the vector field does not vanish.
class NotAFixedPoint : public Error {
 public:
  using Error::Error;
};

}  // namespace curved3b
