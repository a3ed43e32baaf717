#pragma once

// Growth rates: nondecreasing maps [0, inf) -> [1, inf) that diverge.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hkd {

enum class RateKind { exponential, polynomial, logpoly, custom };

/// (t + 1) ln(t + e): the logpoly rate, and the normalizer in the class-G test.
double logpoly(double t);

class GrowthRate {
 public:
  /// e^{alpha t}; alpha > 0.
  static GrowthRate exponential(double alpha);
  /// (t + 1)^alpha; alpha > 0.
  static GrowthRate polynomial(double alpha);
  /// (t + 1) ln(t + e).
  static GrowthRate log_polynomial();
  /// Piecewise-linear through (t_i, v_i); t strictly increasing and starting
  /// at 0. Values are not validated here; `check_growth_rate` reports them.
  static GrowthRate table(std::vector<std::pair<double, double>> samples,
                          std::string source = "inline");

  /// Parses `exp:<alpha>`, `poly:<alpha>`, `logpoly` or `table:<path.csv>`.
  /// Throws DomainError on malformed specifiers or unreadable tables.
  static GrowthRate parse(std::string_view spec);

  /// Throws DomainError for t < 0 or (custom) t past the last sample.
  double operator()(double t) const;

  RateKind kind() const noexcept { return kind_; }
  double alpha() const noexcept { return alpha_; }
  /// Round-trippable specifier, e.g. "exp:1".
  const std::string& spec() const noexcept { return spec_; }
  /// Largest t at which the rate is defined (infinity for closed forms).
  double domain_end() const;

 private:
  GrowthRate(RateKind kind, double alpha, std::string spec)
      : kind_(kind), alpha_(alpha), spec_(std::move(spec)) {}

  RateKind kind_;
  double alpha_ = 0.0;
  std::string spec_;
  std::vector<std::pair<double, double>> samples_;
};

struct RateViolation {
  double t = 0.0;
  std::string reason;
};

struct RateCheck {
  bool pass = false;
  std::optional<RateViolation> first_violation;
  /// Heuristic only: value(back) >= value(front) + kDivergenceGap.
  bool divergence_plausible = false;
};

inline constexpr double kDivergenceGap = 1e-6;

/// Codomain (>= 1) and monotonicity on consecutive grid points. Throws
/// DomainError for an empty grid.
RateCheck check_growth_rate(const GrowthRate& rate, std::span<const double> grid);

struct WitnessCheck {
  bool pass = false;
  /// min over the grid of h(t)^2 / (logpoly(t) g(t)).
  double worst_margin = 0.0;
  double worst_t = 0.0;
};

/// Tests h^2(t) / ((t+1) ln(t+e)) >= g(t) on the grid, i.e. whether g
/// witnesses h in the class G.
WitnessCheck class_g_witness(const GrowthRate& h, const GrowthRate& g,
                             std::span<const double> grid);

}  // namespace hkd
