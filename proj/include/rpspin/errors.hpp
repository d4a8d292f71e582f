#pragma once

#include <stdexcept>
#include <string>

namespace rpspin {

/// Invalid argument: bad site index, dimension mismatch, parameter out of range.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Floating-point results that violate a mathematical guarantee.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The old coherence measure has a vanishing denominator.
class UndefinedMeasureError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Coherence distillation requested at p_coh below the singularity guard.
class SingularDecompositionError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// NaN or loss of positivity while integrating a master equation.
class IntegrationFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A trajectory drew a projection onto a subspace it has (numerically) no weight in.
class ImpossibleJumpError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace rpspin
