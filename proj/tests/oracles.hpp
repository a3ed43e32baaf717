#pragma once

// Closed-form references for the test suites. Nothing here calls into the
// library: every value is derived by hand from the defining formulas.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace oracle {

inline double r(double t) { return (t + 1.0) * std::log(t + std::numbers::e); }

/// P-coefficient (h(s)/h(t)) r(s)/r(t) of the constant-projector example
/// with h = exp:alpha.
inline double decay_exp(double alpha, double t, double s) {
  return std::exp(alpha * (s - t)) * r(s) / r(t);
}

/// Q-coefficient (k(t)/k(s)) r(s)/r(t) with k = exp:beta.
inline double expand_exp(double beta, double t, double s) {
  return std::exp(beta * (t - s)) * r(s) / r(t);
}

/// N1_req(s) for the constant-projector example with h = exp:1 by brute force
/// over t in `grid`, t >= s: e^{t-s} a(t, s).
inline double constant_p_n1(const std::vector<double>& grid, double s) {
  double best = 0.0;
  for (double t : grid)
    if (t >= s) best = std::max(best, std::exp(t - s) * decay_exp(1.0, t, s));
  return best;
}

/// N2_req(t) for the same system with k = exp:1: e^{t-s} / c(t, s) over s <= t.
inline double constant_p_n2(const std::vector<double>& grid, double t) {
  double best = 0.0;
  for (double s : grid)
    if (s <= t) best = std::max(best, std::exp(t - s) / expand_exp(1.0, t, s));
  return best;
}

inline std::vector<double> uniform(double horizon, int points) {
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) g[i] = horizon * i / (points - 1);
  return g;
}

}  // namespace oracle
