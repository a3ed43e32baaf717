#pragma once

// Evolution operators U(t, s) on R^n with projector families, structural
// checkers, the kernel inverse V(t, s) and the gallery of worked examples.

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hkd/grid.hpp"
#include "hkd/linops.hpp"
#include "hkd/rates.hpp"

namespace hkd {

/// Denominators below this are skipped in every ratio scan.
inline constexpr double kSkipNorm = 1e-300;

class EvolutionSystem {
 public:
  using OperatorFn = std::function<Matrix(double t, double s)>;
  using ProjectorFn = std::function<Matrix(double t)>;

  EvolutionSystem(StateSpace space, OperatorFn u, ProjectorFn p, std::string label);

  const StateSpace& space() const noexcept { return space_; }
  const std::string& label() const noexcept { return label_; }

  /// U(t, s) for t >= s >= 0; DomainError otherwise.
  Matrix u(double t, double s) const;
  Matrix p(double t) const;
  /// I - P(t).
  Matrix q(double t) const;

 private:
  StateSpace space_;
  OperatorFn u_;
  ProjectorFn p_;
  std::string label_;
};

using SystemPtr = std::shared_ptr<const EvolutionSystem>;

/// U, P and Q sampled once on a grid. U is stored for i >= j only.
class SampledSystem {
 public:
  SampledSystem(SystemPtr system, TimeGrid grid);

  const EvolutionSystem& system() const noexcept { return *system_; }
  const SystemPtr& system_ptr() const noexcept { return system_; }
  const TimeGrid& grid() const noexcept { return grid_; }
  const StateSpace& space() const noexcept { return system_->space(); }
  std::size_t size() const noexcept { return grid_.size(); }

  /// U(grid[i], grid[j]) for i >= j.
  const Matrix& u(std::size_t i, std::size_t j) const;
  const Matrix& p(std::size_t i) const { return p_[i]; }
  const Matrix& q(std::size_t i) const { return q_[i]; }

 private:
  SystemPtr system_;
  TimeGrid grid_;
  std::vector<Matrix> u_;
  std::vector<Matrix> p_;
  std::vector<Matrix> q_;
};

struct Triple {
  std::size_t t = 0, s = 0, t0 = 0;
  auto operator<=>(const Triple&) const = default;
};

struct PairProbe {
  std::size_t t = 0, s = 0, probe = 0;
  auto operator<=>(const PairProbe&) const = default;
};

struct EvolutionCheck {
  bool pass = false;
  /// max |U(t,t) - I| over the grid (property e1).
  double identity_defect = 0.0;
  /// Worst |U(t,t0) - U(t,s)U(s,t0)| / max(1, |U(t,t0)|), entrywise max norm.
  double worst_defect = 0.0;
  Triple worst;
};

EvolutionCheck check_evolution_property(const SampledSystem& sys, double tol);

struct ProjectorFamilyCheck {
  bool pass = false;
  double worst_defect = 0.0;
  std::size_t worst_index = 0;
  /// max |P(t)|_max over the grid; unbounded families are allowed.
  double max_projector_entry = 0.0;
};

ProjectorFamilyCheck check_projector_family(const SampledSystem& sys, double tol = kRankTol);

/// |U(t,s)P(s)x - P(t)U(t,s)x| in the base norm.
double invariance_defect(const EvolutionSystem& sys, double t, double s, const Vector& x);

struct InvarianceCheck {
  bool pass = false;
  /// Worst of defect / (1 + |U(t,s)x|).
  double worst_relative = 0.0;
  /// Raw defect at the worst location.
  double worst_defect = 0.0;
  PairProbe worst;
  /// The same scan for Q; equal to the P scan up to roundoff.
  double q_worst_relative = 0.0;
};

InvarianceCheck check_invariance(const SampledSystem& sys, std::span<const Vector> probes,
                                 double tol);

/// V(t, s): inverse of U(t, s) restricted to range Q(s), as a map
/// range Q(t) -> range Q(s), extended by zero on range P(t).
/// Throws NotCompatibleError naming (t, s) when the restriction is singular.
Matrix build_kernel_inverse(const EvolutionSystem& sys, double t, double s,
                            double tol = kRankTol);

/// Lazily built table of V(grid[i], grid[j]), i >= j. Each entry is computed
/// once even under concurrent access.
class KernelInverse {
 public:
  KernelInverse(std::shared_ptr<const SampledSystem> sampled, double tol = kRankTol);

  const SampledSystem& sampled() const noexcept { return *sampled_; }
  const Matrix& at(std::size_t i, std::size_t j) const;
  /// Builds every entry; rethrows the first NotCompatibleError.
  void build_all() const;

 private:
  struct Slot {
    std::once_flag once;
    Matrix value;
    std::exception_ptr error;
  };
  std::shared_ptr<const SampledSystem> sampled_;
  double tol_;
  std::unique_ptr<Slot[]> slots_;
};

struct IdentityResult {
  bool pass = false;
  double worst_relative = 0.0;
};

struct VIdentitiesCheck {
  IdentityResult v1, v2, v3, v4;
  bool pass() const { return v1.pass && v2.pass && v3.pass && v4.pass; }
};

/// v1: U V Q(t) = Q(t); v2: V U Q(s) = Q(s); v3: V(t,t0) = V(s,t0) V(t,s);
/// v4: V Q(t) = Q(s) V Q(t). Defects relative to 1 + |operand|.
VIdentitiesCheck check_v_identities(const KernelInverse& v, std::span<const Vector> probes,
                                    double tol);

// ---------------------------------------------------------------------------
// Example gallery

/// u(t) for the scalar u ln u example.
class ScalarProfile {
 public:
  /// u(t) = e^{t + shift}.
  static ScalarProfile exp_shift(double shift);
  /// u(t) = a + b t.
  static ScalarProfile linear(double a, double b);
  /// `exp-shift:<c>` or `linear:<a>:<b>`.
  static ScalarProfile parse(std::string_view spec);

  double operator()(double t) const;
  /// u(t) ln u(t), computed without cancellation for the exp-shift family.
  double phi(double t) const;
  const std::string& spec() const noexcept { return spec_; }

 private:
  enum class Kind { exp_shift, linear };
  ScalarProfile(Kind kind, double a, double b, std::string spec)
      : kind_(kind), a_(a), b_(b), spec_(std::move(spec)) {}
  Kind kind_;
  double a_, b_;
  std::string spec_;
};

struct GalleryOptions {
  GrowthRate h = GrowthRate::exponential(1.0);
  GrowthRate k = GrowthRate::exponential(1.0);
  std::optional<ScalarProfile> u;
  /// Grid on which `inf u > 1` is validated for scalar-ulnu.
  TimeGrid validation_grid = TimeGrid::default_grid();
};

inline constexpr std::array<std::string_view, 7> kGalleryNames = {
    "scalar-ulnu",        "dicho-2d-literal", "dicho-2d-repaired", "dicho-2d-constantP",
    "growth-not-dicho",   "split-exp",        "identity-2d"};

/// Builds a named example. Throws DomainError for unknown names and invalid
/// profiles.
SystemPtr example_gallery(std::string_view name, const GalleryOptions& options = {});

/// U(t,s) = e^{-decay (t-s)} P + e^{growth (t-s)} Q with P = diag(1, 0).
SystemPtr make_split_system(double decay, double growth);

}  // namespace hkd
