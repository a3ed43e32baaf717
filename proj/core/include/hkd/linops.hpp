#pragma once

// Small dense linear algebra on R^n: base norms, projector checks, subspace
// bases and solves restricted to a subspace.

#include <cstddef>
#include <string_view>

#include <Eigen/Dense>

namespace hkd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Columns form an orthonormal basis of a subspace (possibly zero columns).
using SubspaceBasis = Eigen::MatrixXd;

inline constexpr double kRankTol = 1e-10;

enum class NormKind { max, euclidean };

std::string_view to_string(NormKind kind);
NormKind parse_norm_kind(std::string_view text);

/// R^n with a fixed base norm.
class StateSpace {
 public:
  explicit StateSpace(std::size_t dimension, NormKind norm = NormKind::max);

  std::size_t dimension() const noexcept { return dimension_; }
  NormKind norm_kind() const noexcept { return norm_; }

  double norm(const Vector& x) const;
  Matrix identity() const { return Matrix::Identity(dim(), dim()); }
  Matrix zero() const { return Matrix::Zero(dim(), dim()); }

  bool operator==(const StateSpace&) const = default;

 private:
  Eigen::Index dim() const { return static_cast<Eigen::Index>(dimension_); }
  std::size_t dimension_;
  NormKind norm_;
};

/// Entrywise max |a_ij|.
double max_abs(const Matrix& a);
bool all_finite(const Matrix& a);

Vector apply(const Matrix& a, const Vector& x);

struct ProjectorCheck {
  bool pass = false;
  double defect = 0.0;  // max |(A^2 - A)_ij|
};

ProjectorCheck is_projector(const Matrix& a, double tol = kRankTol);

/// I - P. Throws ContractError if P is not a projector at `tol`.
Matrix complement(const Matrix& p, double tol = kRankTol);

/// Orthonormal basis of range(P); singular values below tol * max(sigma_max, 1) are
/// treated as zero.
SubspaceBasis range_basis(const Matrix& p, double tol = kRankTol);

/// The unique w in span(basis) with A w = y.
///
/// Throws NotCompatibleError when A restricted to span(basis) is singular at
/// `tol` (relative to its own largest singular value), and ResidualError when y is not
/// in A(span(basis)) to within tol * (1 + |y|).
Vector solve_on_subspace(const Matrix& a, const SubspaceBasis& basis, const Vector& y,
                         double tol = kRankTol);

}  // namespace hkd
