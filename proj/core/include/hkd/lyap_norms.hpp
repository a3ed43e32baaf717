#pragma once

// Lyapunov-type norm families evaluated by suprema over a shared time grid.
//
//   growth-type:    |x|_t   = max_{tau >= t} h(t)/h(tau) |U(tau,t)P(t)x|
//                           + max_{tau <= t} k(tau)/k(t) |V(t,tau)Q(t)x|
//   dichotomy-type: |||x|||_t = max_{tau >= t} h(tau)/h(t) |U(tau,t)P(t)x|
//                             + max_{tau <= t} k(t)/k(tau) |V(t,tau)Q(t)x|
//
// Every supremum runs over the same global grid, so the value computed here is
// a lower bound of the supremum over [t, inf) resp. [0, t].

#include <cstddef>
#include <functional>
#include <memory>
#include <span>

#include "hkd/rates.hpp"
#include "hkd/systems.hpp"

namespace hkd {

enum class NormFamilyKind { growth, dichotomy };

std::string_view to_string(NormFamilyKind kind);

class NormFamily {
 public:
  NormFamily(NormFamilyKind kind, std::shared_ptr<const KernelInverse> kernel_inverse,
             GrowthRate h, GrowthRate k);

  NormFamilyKind kind() const noexcept { return kind_; }
  const SampledSystem& sampled() const noexcept { return kernel_inverse_->sampled(); }
  const KernelInverse& kernel_inverse() const noexcept { return *kernel_inverse_; }
  const TimeGrid& grid() const noexcept { return sampled().grid(); }
  const GrowthRate& h() const noexcept { return h_; }
  const GrowthRate& k() const noexcept { return k_; }

  /// Supremum over tau >= t of the P-component term.
  double p_term(std::size_t t_index, const Vector& x) const;
  /// Supremum over tau <= t of the Q-component term.
  double q_term(std::size_t t_index, const Vector& x) const;
  /// p_term + q_term.
  double value(std::size_t t_index, const Vector& x) const;

  /// Evaluation at a grid time; DomainError if t is not a grid point.
  double operator()(double t, const Vector& x) const;
  std::size_t require_index(double t) const;

 private:
  double h_ratio(std::size_t t_index, std::size_t tau_index) const;
  double k_ratio(std::size_t t_index, std::size_t tau_index) const;

  NormFamilyKind kind_;
  std::shared_ptr<const KernelInverse> kernel_inverse_;
  GrowthRate h_, k_;
  std::vector<double> h_values_, k_values_;
};

double growth_norm(const NormFamily& family, double t, const Vector& x);
double dichotomy_norm(const NormFamily& family, double t, const Vector& x);

struct IdentityCheck {
  bool pass = false;
  double worst_relative = 0.0;
  PairProbe worst;  // s and t coincide
};

struct ProjectedIdentities {
  IdentityCheck p_identity;     // |P(t)x|_t == P-term(x)
  IdentityCheck q_identity;     // |Q(t)x|_t == Q-term(x)
  IdentityCheck split_identity;  // |x|_t == |P(t)x|_t + |Q(t)x|_t
  bool pass() const { return p_identity.pass && q_identity.pass && split_identity.pass; }
};

ProjectedIdentities check_projected_identities(const NormFamily& family,
                                               std::span<const Vector> probes, double tol);

using GainFunction = std::function<double(double t)>;

struct SandwichCheck {
  bool pass = false;
  /// Largest (lhs - rhs) / rhs over all inequalities; <= tol on pass.
  double worst_margin = 0.0;
  PairProbe worst;
  /// Which inequality produced worst_margin: "lower", "upper", "P-lower",
  /// "P-upper", "Q-lower", "Q-upper".
  std::string worst_inequality;
};

/// |x| <= |x|_t <= N(t)(|P(t)x| + |Q(t)x|), and the same with x replaced by
/// P(t)x and Q(t)x, on every grid time and probe, with relative slack tol.
SandwichCheck check_compatibility_sandwich(const NormFamily& family, const GainFunction& bound,
                                           std::span<const Vector> probes, double tol);

}  // namespace hkd
