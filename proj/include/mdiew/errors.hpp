#pragma once

#include <stdexcept>
#include <string>

namespace mdiew {

// Base class for every failure the library can raise.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// A parameter lies outside its documented domain.
class DomainError : public Error {
  public:
    using Error::Error;
};

// Operand shapes are incompatible (subsystem lists, basis counts, ...).
class DimensionError : public DomainError {
  public:
    using DomainError::DomainError;
};

// A constructed object violates one of its structural invariants.
class ValidationError : public DomainError {
  public:
    using DomainError::DomainError;
};

// A numeric procedure failed to reach its required accuracy.
class NumericalError : public Error {
  public:
    using Error::Error;
};

// Least-squares residual above tolerance: the target is outside the span.
class ResidualError : public NumericalError {
  public:
    explicit ResidualError(double residual)
        : NumericalError("linear system is inconsistent, residual " + std::to_string(residual)),
          residual_(residual) {}
    double residual() const { return residual_; }

  private:
    double residual_;
};

// The column set is (numerically) rank deficient.
class RankDeficiencyError : public NumericalError {
  public:
    using NumericalError::NumericalError;
};

// Detector efficiencies outside (0, 1] or a request at the pole of the
// measured/true count relation, where the count interpretation breaks down.
class UnphysicalRegimeError : public Error {
  public:
    using Error::Error;
};

}  // namespace mdiew
