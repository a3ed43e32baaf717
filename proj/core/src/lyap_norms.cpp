#include "hkd/lyap_norms.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "hkd/errors.hpp"
#include "hkd/parallel.hpp"

namespace hkd {

std::string_view to_string(NormFamilyKind kind) {
  return kind == NormFamilyKind::growth ? "growth" : "dichotomy";
}

NormFamily::NormFamily(NormFamilyKind kind, std::shared_ptr<const KernelInverse> kernel_inverse,
                       GrowthRate h, GrowthRate k)
    : kind_(kind), kernel_inverse_(std::move(kernel_inverse)), h_(std::move(h)), k_(std::move(k)) {
  const auto& grid = this->grid();
  h_values_.reserve(grid.size());
  k_values_.reserve(grid.size());
  for (double t : grid.points()) {
    h_values_.push_back(h_(t));
    k_values_.push_back(k_(t));
  }
}

double NormFamily::h_ratio(std::size_t t, std::size_t tau) const {
  return kind_ == NormFamilyKind::growth ? h_values_[t] / h_values_[tau]
                                         : h_values_[tau] / h_values_[t];
}

double NormFamily::k_ratio(std::size_t t, std::size_t tau) const {
  return kind_ == NormFamilyKind::growth ? k_values_[tau] / k_values_[t]
                                         : k_values_[t] / k_values_[tau];
}

double NormFamily::p_term(std::size_t t, const Vector& x) const {
  const SampledSystem& sys = sampled();
  const auto& space = sys.space();
  const Vector px = sys.p(t) * x;
  Vector image(px.size());
  double best = 0.0;
  for (std::size_t tau = t; tau < sys.size(); ++tau) {
    image.noalias() = sys.u(tau, t) * px;
    best = std::max(best, h_ratio(t, tau) * space.norm(image));
  }
  return best;
}

double NormFamily::q_term(std::size_t t, const Vector& x) const {
  const SampledSystem& sys = sampled();
  const auto& space = sys.space();
  const Vector qx = sys.q(t) * x;
  Vector image(qx.size());
  double best = 0.0;
  for (std::size_t tau = 0; tau <= t; ++tau) {
    image.noalias() = kernel_inverse_->at(t, tau) * qx;
    best = std::max(best, k_ratio(t, tau) * space.norm(image));
  }
  return best;
}

double NormFamily::value(std::size_t t, const Vector& x) const { return p_term(t, x) + q_term(t, x); }

std::size_t NormFamily::require_index(double t) const {
  const auto index = grid().index_of(t);
  if (!index) throw DomainError("norm family evaluated off the grid at t = " + std::to_string(t));
  return *index;
}

double NormFamily::operator()(double t, const Vector& x) const { return value(require_index(t), x); }

double growth_norm(const NormFamily& family, double t, const Vector& x) {
  if (family.kind() != NormFamilyKind::growth) throw ContractError("growth_norm on a dichotomy-type family");
  return family(t, x);
}

double dichotomy_norm(const NormFamily& family, double t, const Vector& x) {
  if (family.kind() != NormFamilyKind::dichotomy)
    throw ContractError("dichotomy_norm on a growth-type family");
  return family(t, x);
}

ProjectedIdentities check_projected_identities(const NormFamily& family,
                                               std::span<const Vector> probes, double tol) {
  const SampledSystem& sys = family.sampled();
  const std::size_t n = sys.size();
  struct Row {
    Worst<PairProbe> p, q, split;
  };
  std::vector<Row> rows(n);
  parallel::for_each_index(n, [&](std::size_t i) {
    for (std::size_t k = 0; k < probes.size(); ++k) {
      const Vector& x = probes[k];
      const Vector px = sys.p(i) * x;
      const Vector qx = sys.q(i) * x;
      const double full = family.value(i, x);
      const double norm_px = family.value(i, px);
      const double norm_qx = family.value(i, qx);
      const double scale = std::max({full, norm_px, norm_qx, 1e-300});
      rows[i].p.offer(std::abs(norm_px - family.p_term(i, x)) / scale, {i, i, k});
      rows[i].q.offer(std::abs(norm_qx - family.q_term(i, x)) / scale, {i, i, k});
      rows[i].split.offer(std::abs(full - (norm_px + norm_qx)) / scale, {i, i, k});
    }
  });
  Worst<PairProbe> p, q, split;
  for (const auto& r : rows) {
    p.merge(r.p);
    q.merge(r.q);
    split.merge(r.split);
  }
  const auto finish = [tol](const Worst<PairProbe>& w) {
    const double v = w.seen ? w.value : 0.0;
    return IdentityCheck{v <= tol, v, w.where};
  };
  return {finish(p), finish(q), finish(split)};
}

SandwichCheck check_compatibility_sandwich(const NormFamily& family, const GainFunction& bound,
                                           std::span<const Vector> probes, double tol) {
  const SampledSystem& sys = family.sampled();
  const auto& space = sys.space();
  const std::size_t n = sys.size();
  static constexpr const char* kNames[] = {"lower", "upper", "P-lower", "P-upper", "Q-lower", "Q-upper"};
  using Location = std::pair<PairProbe, int>;
  const auto worst = parallel_worst<Location>(n, [&](std::size_t i) {
    Worst<Location> w;
    const double gain = bound(sys.grid()[i]);
    // (lhs - rhs) / rhs, with 0 <= 0 counted as exact.
    const auto margin = [](double lhs, double rhs) {
      if (rhs <= 0.0) return lhs <= 0.0 ? -1.0 : std::numeric_limits<double>::infinity();
      return (lhs - rhs) / rhs;
    };
    for (std::size_t k = 0; k < probes.size(); ++k) {
      const Vector& x = probes[k];
      const Vector px = sys.p(i) * x;
      const Vector qx = sys.q(i) * x;
      const double base_p = space.norm(px);
      const double base_q = space.norm(qx);
      const double nx = family.value(i, x);
      const double npx = family.value(i, px);
      const double nqx = family.value(i, qx);
      const PairProbe at{i, i, k};
      w.offer(margin(space.norm(x), nx), {at, 0});
      w.offer(margin(nx, gain * (base_p + base_q)), {at, 1});
      w.offer(margin(base_p, npx), {at, 2});
      w.offer(margin(npx, gain * base_p), {at, 3});
      w.offer(margin(base_q, nqx), {at, 4});
      w.offer(margin(nqx, gain * base_q), {at, 5});
    }
    return w;
  });
  SandwichCheck result;
  result.worst_margin = worst.seen ? worst.value : -1.0;
  result.worst = worst.where.first;
  result.worst_inequality = kNames[worst.where.second];
  result.pass = result.worst_margin <= tol;
  return result;
}

}  // namespace hkd
