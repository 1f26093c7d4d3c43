#pragma once

#include <stdexcept>
#include <string>

namespace urbanik {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParam : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// min(x^2, 1) k(x) is not integrable.
class NonConvergent : public Error {
 public:
  using Error::Error;
};

class QuadratureFailure : public Error {
 public:
  using Error::Error;
};

/// A closed-form chain was asked for a D-iterate beyond its stored order.
class DerivativeOrderUnavailable : public Error {
 public:
  using Error::Error;
};

class UnknownDistribution : public Error {
 public:
  using Error::Error;
};

/// Laplace series coefficients whose squares are not summable.
class InvalidSequence : public Error {
 public:
  using Error::Error;
};

/// Tail correction requested for a series without an analytic tail.
class TailUnknown : public Error {
 public:
  using Error::Error;
};

}  // namespace urbanik
