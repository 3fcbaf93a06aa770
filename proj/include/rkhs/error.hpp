#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rkhs {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad JSON, duplicate labels, invalid edges, etc.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

class DomainMismatch : public Error {
 public:
  using Error::Error;
};

/// The Gram matrix is not strictly positive definite where it must be.
class SingularGram : public Error {
 public:
  using Error::Error;
};

/// delta_target is not in the numerical range of a semidefinite Gram matrix.
class NotInRange : public Error {
 public:
  NotInRange(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class NotPSD : public Error {
 public:
  NotPSD(const std::string& what, std::size_t witness)
      : Error(what), witness_(witness) {}
  std::size_t witness() const { return witness_; }

 private:
  std::size_t witness_;
};

/// A filtration trace decreased beyond round-off: the linear algebra lost
/// accuracy and the values cannot be trusted.
class MonotonicityViolation : public Error {
 public:
  MonotonicityViolation(const std::string& what, std::size_t stage)
      : Error(what), stage_(stage) {}
  std::size_t stage() const { return stage_; }

 private:
  std::size_t stage_;
};

class TooFewStages : public Error {
 public:
  using Error::Error;
};

class BoundaryIndex : public Error {
 public:
  using Error::Error;
};

class Disconnected : public Error {
 public:
  using Error::Error;
};

class MissingNeighbor : public Error {
 public:
  using Error::Error;
};

class WeightUndefined : public Error {
 public:
  using Error::Error;
};

class BoundaryWord : public Error {
 public:
  using Error::Error;
};

class IdenticalWords : public Error {
 public:
  using Error::Error;
};

}  // namespace rkhs
