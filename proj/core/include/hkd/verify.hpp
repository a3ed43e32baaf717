#pragma once

// Envelope estimation for the dichotomy and growth inequalities, uniformity
// classification, and numerical checks of the norm-family characterizations.
//
// Every quantity here is a maximum over a finite grid and probe set. An
// envelope value is therefore a lower bound of the true minimal gain, and a
// candidate gain is certified admissible on the grid only.

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "hkd/lyap_norms.hpp"
#include "hkd/rates.hpp"
#include "hkd/systems.hpp"

namespace hkd {

inline constexpr double kStructuralTol = 1e-9;
inline constexpr double kEnvelopeTol = 1e-6;
inline constexpr double kUniformityDelta = 0.1;
/// Ratio below 1 + kFlatTol counts as "did not grow".
inline constexpr double kFlatTol = 1e-9;

enum class Verdict { pass, fail, precondition_failed, inconclusive };
std::string_view to_string(Verdict v);

enum class EnvelopeKind { dichotomy, growth };
std::string_view to_string(EnvelopeKind kind);

struct EnvelopeViolation {
  std::string kind;  // "clamped", "non-finite"
  std::string which;  // "first" or "second"
  std::size_t index = 0;
  double value = 0.0;
};

/// Minimal admissible gains on a grid.
///
/// dichotomy: first  = N1_req(s) = max_{t>=s,x} h(t)|U(t,s)P(s)x| / (h(s)|P(s)x|)
///            second = N2_req(t) = max_{s<=t,x} k(t)|Q(s)x| / (k(s)|U(t,s)Q(s)x|)
/// growth:    first  = M1_req(s) = max_{t>=s,x} h(s)|U(t,s)P(s)x| / (h(t)|P(s)x|)
///            second = M2_req(t) = max_{s<=t,x} k(s)|Q(s)x| / (k(t)|U(t,s)Q(s)x|)
struct EnvelopeReport {
  EnvelopeKind kind = EnvelopeKind::dichotomy;
  std::string system_label;
  std::string h_spec, k_spec;
  std::vector<double> times;
  std::vector<double> first_req, second_req;
  /// Grid index of the other time at which each requirement is attained.
  std::vector<std::size_t> first_argmax, second_argmax;
  std::vector<double> first_hull, second_hull;
  /// Running max of max(first, second): the nondecreasing candidate gain.
  std::vector<double> hull;
  std::vector<EnvelopeViolation> violations;
  std::size_t skipped_ratios = 0;

  double max_value() const;
  bool finite() const;
};

EnvelopeReport dichotomy_envelope(const SampledSystem& sys, const GrowthRate& h,
                                  const GrowthRate& k, std::span<const Vector> probes,
                                  double invariance_tol = kStructuralTol);
EnvelopeReport growth_envelope(const SampledSystem& sys, const GrowthRate& h,
                               const GrowthRate& k, std::span<const Vector> probes,
                               double invariance_tol = kStructuralTol);

/// Running maximum.
std::vector<double> monotone_hull(std::span<const double> values);

enum class Uniformity { uniform, nonuniform, inconclusive };
std::string_view to_string(Uniformity u);

struct UniformityVerdict {
  Uniformity verdict = Uniformity::inconclusive;
  double max_small = 0.0;
  double max_large = 0.0;
  double ratio = 0.0;
};

/// Two-horizon test on the overall envelope maximum. nonuniform if it grows
/// by more than 1 + delta; uniform if it does not grow (within kFlatTol);
/// inconclusive otherwise or when either report is non-finite.
/// Throws DomainError when the reports belong to different systems or rates
/// or the grids are not nested.
UniformityVerdict classify_uniformity(const EnvelopeReport& at_horizon,
                                      const EnvelopeReport& at_double_horizon,
                                      double delta = kUniformityDelta);

enum class HorizonGrowth { bounded, growing, inconclusive };
std::string_view to_string(HorizonGrowth g);

struct HorizonVerdict {
  HorizonGrowth verdict = HorizonGrowth::inconclusive;
  /// max over shared indices of value_large / value_small.
  double worst_ratio = 1.0;
  std::size_t worst_index = 0;
};

/// Compares a gain indexed by the earlier time (a supremum over later times)
/// at two nested horizons. Growth at a fixed index means no finite gain
/// exists there.
HorizonVerdict classify_horizon_growth(std::span<const double> at_horizon,
                                       std::span<const double> at_double_horizon,
                                       double delta = kUniformityDelta);

struct DichotomyPrecondition {
  bool invariant = false;
  bool compatible = false;
  bool finite = false;
  HorizonVerdict p_part;
  std::string detail;

  bool p_ok() const { return invariant && compatible && finite && p_part.verdict != HorizonGrowth::growing; }
  bool q_ok() const { return invariant && compatible && finite; }
  bool ok() const { return p_ok() && q_ok(); }
};

struct GrowthPrecondition {
  bool invariant = false;
  bool compatible = false;
  bool finite = false;
  std::string detail;
  bool ok() const { return invariant && compatible && finite; }
};

struct CheckOptions {
  double structural_tol = kStructuralTol;
  double slack_tol = kStructuralTol;
  double sufficiency_tol = kEnvelopeTol;
  double delta = kUniformityDelta;
  /// Run the horizon-doubling test for gains indexed by the earlier time.
  bool horizon_test = true;
};

DichotomyPrecondition check_dichotomy_precondition(const SystemPtr& system, const GrowthRate& h,
                                                   const GrowthRate& k, const TimeGrid& grid,
                                                   std::span<const Vector> probes,
                                                   const CheckOptions& options = {});

GrowthPrecondition check_growth_precondition(const SampledSystem& sys, const GrowthRate& h,
                                             const GrowthRate& k, std::span<const Vector> probes,
                                             const CheckOptions& options = {});

struct PrimedFormsResult {
  bool pass = false;
  /// Unprimed and V-based envelopes: N2 / N2' (dichotomy), M2 / M2' (growth).
  std::vector<double> n2, n2_primed, m2, m2_primed;
  /// Worst relative slack of (kd2') under N = hull(N2), and of (kd2) under
  /// N = hull(N2'); likewise for the growth pair.
  double kd2_primed_slack = 0.0, kd2_slack = 0.0;
  double kg2_primed_slack = 0.0, kg2_slack = 0.0;
  /// max |N2'/N2 - 1| and |M2'/M2 - 1| over the grid.
  double pointwise_gap = 0.0;
};

/// Cross-substitution check between the Q-inequalities stated with
/// U(t,s)Q(s) and with V(t,s)Q(t). The first inequalities coincide.
PrimedFormsResult check_primed_forms(const KernelInverse& v, const GrowthRate& h,
                                     const GrowthRate& k, std::span<const Vector> probes,
                                     double tol = kEnvelopeTol);

/// The V-based requirement max_{s<=t,x} ratio(t,s) |V(t,s)Q(t)x| / |Q(t)x|,
/// with ratio k(t)/k(s) (dichotomy) or k(s)/k(t) (growth).
std::vector<double> primed_second_requirement(const KernelInverse& v, EnvelopeKind kind,
                                              const GrowthRate& k,
                                              std::span<const Vector> probes);

struct InequalityResult {
  Verdict verdict = Verdict::inconclusive;
  double worst_slack = 0.0;
  PairProbe worst;
};

struct Theorem1Result {
  Verdict verdict = Verdict::inconclusive;
  DichotomyPrecondition precondition;
  /// h(t)|||U(t,s)P(s)x|||_t <= h(s)|||P(s)x|||_s
  InequalityResult hd1;
  /// k(t)|||V(t,s)Q(t)x|||_s <= k(s)|||Q(t)x|||_t
  InequalityResult kd2;
  /// Gains recovered from the norm family via the sandwich specializations.
  std::vector<double> derived_p, derived_q, derived_hull;
  /// Direct envelope hull, max(N1, N2).
  std::vector<double> envelope_hull;
  double sufficiency_deviation = 0.0;
  double sufficiency_slack = 0.0;
  bool sufficiency_pass = false;
};

Theorem1Result check_theorem1(const SystemPtr& system, const GrowthRate& h, const GrowthRate& k,
                              const TimeGrid& grid, std::span<const Vector> probes,
                              const CheckOptions& options = {});

struct Theorem2Result {
  Verdict verdict = Verdict::inconclusive;
  GrowthPrecondition precondition;
  /// Minimal N for h(t)|U(t,s)P(s)x|_t <= N(s)h(s)|P(s)x|_s (indexed by s)
  /// and k(t)|V(t,s)Q(t)x|_s <= N(t)k(s)|Q(t)x|_t (indexed by t).
  std::vector<double> fitted_p, fitted_q, fitted_hull;
  InequalityResult hd1, kd2;
  HorizonVerdict horizon;
  /// Growth gain M = hull(max(M1, M2, M2')) and the product N1 = N * M.
  std::vector<double> growth_hull, product_gain;
  /// Worst relative slack of the unprimed dichotomy inequalities under N1.
  double sufficiency_slack = 0.0;
  bool sufficiency_pass = false;
  /// fitted <= dichotomy envelope (N1, N2'), relative slack.
  double necessity_slack = 0.0;
};

Theorem2Result check_theorem2(const SystemPtr& system, const GrowthRate& h, const GrowthRate& k,
                              const TimeGrid& grid, std::span<const Vector> probes,
                              const CheckOptions& options = {});

enum class CorollaryFlavor { exponential, polynomial };
std::string_view to_string(CorollaryFlavor f);

struct CorollaryReport {
  CorollaryFlavor flavor = CorollaryFlavor::exponential;
  double alpha = 0.0, beta = 0.0;
  /// Keyed by the corollary's labels: ed1, ed2, ed1', ed2' (or pd...).
  std::map<std::string, InequalityResult> inequalities;
  Theorem1Result theorem1;
  Theorem2Result theorem2;
  bool pass() const;
};

/// Specializes h, k to exponential or polynomial rates and delegates to the
/// two theorem checks. Throws DomainError for alpha or beta <= 0.
CorollaryReport check_corollaries(const SystemPtr& system, double alpha, double beta,
                                  CorollaryFlavor flavor, const TimeGrid& grid,
                                  std::span<const Vector> probes,
                                  const CheckOptions& options = {});

}  // namespace hkd
