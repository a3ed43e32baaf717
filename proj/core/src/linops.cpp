#include "hkd/linops.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "hkd/errors.hpp"

namespace hkd {

std::string_view to_string(NormKind kind) {
  return kind == NormKind::max ? "max" : "euclidean";
}

NormKind parse_norm_kind(std::string_view text) {
  if (text == "max") return NormKind::max;
  if (text == "euclidean") return NormKind::euclidean;
  throw DomainError("unknown base norm '" + std::string(text) + "'");
}

StateSpace::StateSpace(std::size_t dimension, NormKind norm) : dimension_(dimension), norm_(norm) {
  if (dimension == 0) throw DomainError("state space dimension must be positive");
}

double StateSpace::norm(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != dimension_)
    throw DomainError("vector dimension does not match the state space");
  if (x.size() == 0) return 0.0;
  return norm_ == NormKind::max ? x.cwiseAbs().maxCoeff() : x.norm();
}

double max_abs(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

bool all_finite(const Matrix& a) { return a.allFinite(); }

Vector apply(const Matrix& a, const Vector& x) {
  if (a.cols() != x.size())
    throw DomainError("apply: matrix has " + std::to_string(a.cols()) + " columns, vector has " +
                      std::to_string(x.size()) + " entries");
  return a * x;
}

ProjectorCheck is_projector(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) return {false, std::numeric_limits<double>::infinity()};
  const double defect = max_abs(a * a - a);
  return {defect <= tol, defect};
}

Matrix complement(const Matrix& p, double tol) {
  const auto check = is_projector(p, tol);
  if (!check.pass)
    throw ContractError("complement: not a projector (defect " + std::to_string(check.defect) + ")");
  return Matrix::Identity(p.rows(), p.cols()) - p;
}

SubspaceBasis range_basis(const Matrix& p, double tol) {
  Eigen::JacobiSVD<Matrix> svd(p, Eigen::ComputeFullU);
  const auto& sigma = svd.singularValues();
  if (sigma.size() == 0 || sigma[0] <= 0.0) return SubspaceBasis(p.rows(), 0);
  Eigen::Index rank = 0;
  while (rank < sigma.size() && sigma[rank] > tol * std::max(sigma[0], 1.0)) ++rank;
  return svd.matrixU().leftCols(rank);
}

Vector solve_on_subspace(const Matrix& a, const SubspaceBasis& basis, const Vector& y, double tol) {
  if (a.cols() != basis.rows() || a.rows() != y.size())
    throw DomainError("solve_on_subspace: dimension mismatch");
  const double y_norm = y.size() == 0 ? 0.0 : y.cwiseAbs().maxCoeff();
  if (basis.cols() == 0) {
    if (y_norm > tol) throw ResidualError("solve_on_subspace: y not in the zero subspace", y_norm);
    return Vector::Zero(a.cols());
  }
  const Matrix restricted = a * basis;
  Eigen::JacobiSVD<Matrix> svd(restricted, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sigma = svd.singularValues();
  const double smallest = sigma[sigma.size() - 1];
  if (!(smallest > tol * sigma[0]) || !(smallest >= std::numeric_limits<double>::min()))
    throw NotCompatibleError("solve_on_subspace: restricted map is singular (sigma_min " +
                             std::to_string(smallest) + ")");
  const Vector coeffs = svd.solve(y);
  Vector w = basis * coeffs;
  const double residual = (a * w - y).cwiseAbs().maxCoeff();
  if (residual > tol * (1.0 + y_norm))
    throw ResidualError("solve_on_subspace: y is not in the image (residual " +
                            std::to_string(residual) + ")",
                        residual);
  return w;
}

}  // namespace hkd
