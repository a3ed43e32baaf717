#pragma once

#include <stdexcept>
#include <string>

namespace hkd {

/// Argument outside the mathematical domain of an operation (negative time,
/// dimension mismatch, off-grid evaluation, empty grid, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A documented precondition on an input object does not hold (e.g. a matrix
/// handed to `complement` is not a projector).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The restriction of an operator to a subspace is numerically singular, so
/// the projector family is not compatible with the evolution operator.
class NotCompatibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Right-hand side is not in the image of the restricted operator.
class ResidualError : public std::runtime_error {
 public:
  ResidualError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// A verification routine was asked to run on a system that does not satisfy
/// its standing hypothesis (invariance, finite envelopes, ...).
class PreconditionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hkd
