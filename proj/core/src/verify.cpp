#include "hkd/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hkd/errors.hpp"
#include "hkd/parallel.hpp"

namespace hkd {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kClampFlag = 1e-12;

std::vector<double> sample_rate(const GrowthRate& rate, const TimeGrid& grid) {
  std::vector<double> v;
  v.reserve(grid.size());
  for (double t : grid.points()) v.push_back(rate(t));
  return v;
}

/// lhs / rhs - 1, treating 0 <= 0 as exact and skipping negligible rhs.
double relative_slack(double lhs, double rhs) {
  if (rhs < kSkipNorm) return lhs < kSkipNorm ? -1.0 : kInf;
  return lhs / rhs - 1.0;
}

double pair_max(std::span<const double> a, std::size_t i, std::span<const double> b) {
  return std::max(a[i], b[i]);
}

std::vector<double> pointwise_max(std::span<const double> a, std::span<const double> b) {
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = pair_max(a, i, b);
  return out;
}

/// Clamps raw requirements at 1 and records the flagged entries.
void finalize_requirement(std::vector<double>& values, std::string_view which,
                          std::vector<EnvelopeViolation>& log) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    double& v = values[i];
    if (!std::isfinite(v)) {
      log.push_back({"non-finite", std::string(which), i, v});
    } else if (v < 1.0) {
      if (v < 1.0 - kClampFlag) log.push_back({"clamped", std::string(which), i, v});
      v = 1.0;
    }
  }
}

std::string describe_location(const TimeGrid& grid, const PairProbe& at) {
  std::ostringstream os;
  os << "(t, s) = (" << grid[at.t] << ", " << grid[at.s] << "), probe " << at.probe;
  return os.str();
}

void require_invariant(const SampledSystem& sys, std::span<const Vector> probes, double tol) {
  const auto inv = check_invariance(sys, probes, tol);
  if (!inv.pass) {
    std::ostringstream os;
    os << "projector family is not invariant for " << sys.system().label() << ": defect "
       << inv.worst_defect << " (relative " << inv.worst_relative << ") at "
       << describe_location(sys.grid(), inv.worst);
    throw PreconditionError(os.str());
  }
}

EnvelopeReport scan_envelope(EnvelopeKind kind, const SampledSystem& sys, const GrowthRate& h,
                             const GrowthRate& k, std::span<const Vector> probes,
                             double invariance_tol) {
  require_invariant(sys, probes, invariance_tol);
  const auto& space = sys.space();
  const std::size_t n = sys.size();
  const auto hv = sample_rate(h, sys.grid());
  const auto kv = sample_rate(k, sys.grid());
  const bool dicho = kind == EnvelopeKind::dichotomy;

  EnvelopeReport report;
  report.kind = kind;
  report.system_label = sys.system().label();
  report.h_spec = h.spec();
  report.k_spec = k.spec();
  report.times.assign(sys.grid().points().begin(), sys.grid().points().end());
  report.first_req.assign(n, 0.0);
  report.second_req.assign(n, 0.0);
  report.first_argmax.assign(n, 0);
  report.second_argmax.assign(n, 0);
  std::vector<std::size_t> skipped(n, 0);

  // first requirement, indexed by s = j: sup over t = i >= j.
  parallel::for_each_index(n, [&](std::size_t j) {
    Worst<std::pair<std::size_t, std::size_t>> w;
    Vector image;
    for (std::size_t p = 0; p < probes.size(); ++p) {
      const Vector px = sys.p(j) * probes[p];
      const double base = space.norm(px);
      if (base < kSkipNorm) {
        skipped[j] += n - j;
        continue;
      }
      for (std::size_t i = j; i < n; ++i) {
        image.noalias() = sys.u(i, j) * px;
        const double rate = dicho ? hv[i] / hv[j] : hv[j] / hv[i];
        w.offer(rate * space.norm(image) / base, {i, p});
      }
    }
    report.first_req[j] = w.seen ? w.value : 1.0;
    report.first_argmax[j] = w.where.first;
  });

  // second requirement, indexed by t = i: sup over s = j <= i.
  parallel::for_each_index(n, [&](std::size_t i) {
    Worst<std::pair<std::size_t, std::size_t>> w;
    Vector image;
    for (std::size_t j = 0; j <= i; ++j) {
      for (std::size_t p = 0; p < probes.size(); ++p) {
        const Vector qx = sys.q(j) * probes[p];
        const double numer = space.norm(qx);
        image.noalias() = sys.u(i, j) * qx;
        const double denom = space.norm(image);
        if (numer < kSkipNorm || denom < kSkipNorm) {
          ++skipped[i];
          continue;
        }
        const double rate = dicho ? kv[i] / kv[j] : kv[j] / kv[i];
        w.offer(rate * numer / denom, {j, p});
      }
    }
    report.second_req[i] = w.seen ? w.value : 1.0;
    report.second_argmax[i] = w.where.first;
  });

  for (std::size_t c : skipped) report.skipped_ratios += c;
  finalize_requirement(report.first_req, "first", report.violations);
  finalize_requirement(report.second_req, "second", report.violations);
  report.first_hull = monotone_hull(report.first_req);
  report.second_hull = monotone_hull(report.second_req);
  report.hull = monotone_hull(pointwise_max(report.first_req, report.second_req));
  return report;
}

/// Everything the theorem checks share for one grid.
struct Prepared {
  std::shared_ptr<const SampledSystem> sampled;
  std::shared_ptr<const KernelInverse> kernel_inverse;
  bool invariant = false;
  bool compatible = false;
  std::string detail;
};

Prepared prepare(const SystemPtr& system, const TimeGrid& grid, std::span<const Vector> probes,
                 double tol) {
  Prepared prep;
  prep.sampled = std::make_shared<const SampledSystem>(system, grid);
  const auto inv = check_invariance(*prep.sampled, probes, tol);
  prep.invariant = inv.pass;
  if (!inv.pass) {
    std::ostringstream os;
    os << "not invariant: defect " << inv.worst_defect << " at "
       << describe_location(grid, inv.worst);
    prep.detail = os.str();
    return prep;
  }
  prep.kernel_inverse = std::make_shared<const KernelInverse>(prep.sampled);
  try {
    prep.kernel_inverse->build_all();
    prep.compatible = true;
  } catch (const NotCompatibleError& e) {
    prep.detail = e.what();
  }
  return prep;
}

/// Requirement N(other) over the triangle, folded by `index_of`.
template <class Ratio>
std::vector<double> fit_over_pairs(std::size_t n, bool index_by_t, Ratio&& ratio) {
  std::vector<double> out(n, 1.0);
  parallel::for_each_index(n, [&](std::size_t a) {
    double best = 0.0;
    bool seen = false;
    if (index_by_t) {
      for (std::size_t j = 0; j <= a; ++j) {
        const double r = ratio(a, j);
        if (!std::isnan(r)) {
          best = std::max(best, r);
          seen = true;
        }
      }
    } else {
      for (std::size_t i = a; i < n; ++i) {
        const double r = ratio(i, a);
        if (!std::isnan(r)) {
          best = std::max(best, r);
          seen = true;
        }
      }
    }
    out[a] = seen ? std::max(best, 1.0) : 1.0;
  });
  return out;
}

/// Worst relative slack over pairs (i >= j) and probes.
template <class Slack>
InequalityResult worst_slack(std::size_t n, std::size_t probe_count, Slack&& slack) {
  const auto w = parallel_worst<PairProbe>(n, [&](std::size_t i) {
    Worst<PairProbe> row;
    for (std::size_t j = 0; j <= i; ++j)
      for (std::size_t p = 0; p < probe_count; ++p) row.offer(slack(i, j, p), {i, j, p});
    return row;
  });
  InequalityResult r;
  r.worst_slack = w.seen ? std::max(w.value, 0.0) : 0.0;
  r.worst = w.where;
  return r;
}

double max_relative_gap(std::span<const double> a, std::span<const double> b) {
  double gap = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) gap = std::max(gap, std::abs(a[i] / b[i] - 1.0));
  return gap;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::precondition_failed: return "precondition-failed";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::string_view to_string(EnvelopeKind kind) {
  return kind == EnvelopeKind::dichotomy ? "dichotomy" : "growth";
}

std::string_view to_string(Uniformity u) {
  switch (u) {
    case Uniformity::uniform: return "uniform";
    case Uniformity::nonuniform: return "nonuniform";
    case Uniformity::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::string_view to_string(HorizonGrowth g) {
  switch (g) {
    case HorizonGrowth::bounded: return "bounded";
    case HorizonGrowth::growing: return "growing";
    case HorizonGrowth::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::string_view to_string(CorollaryFlavor f) {
  return f == CorollaryFlavor::exponential ? "exponential" : "polynomial";
}

double EnvelopeReport::max_value() const {
  double m = 1.0;
  for (double v : first_req) m = std::max(m, std::isnan(v) ? kInf : v);
  for (double v : second_req) m = std::max(m, std::isnan(v) ? kInf : v);
  return m;
}

bool EnvelopeReport::finite() const { return std::isfinite(max_value()); }

std::vector<double> monotone_hull(std::span<const double> values) {
  std::vector<double> out(values.begin(), values.end());
  for (std::size_t i = 1; i < out.size(); ++i) out[i] = std::max(out[i], out[i - 1]);
  return out;
}

EnvelopeReport dichotomy_envelope(const SampledSystem& sys, const GrowthRate& h, const GrowthRate& k,
                                  std::span<const Vector> probes, double invariance_tol) {
  return scan_envelope(EnvelopeKind::dichotomy, sys, h, k, probes, invariance_tol);
}

EnvelopeReport growth_envelope(const SampledSystem& sys, const GrowthRate& h, const GrowthRate& k,
                               std::span<const Vector> probes, double invariance_tol) {
  return scan_envelope(EnvelopeKind::growth, sys, h, k, probes, invariance_tol);
}

UniformityVerdict classify_uniformity(const EnvelopeReport& small, const EnvelopeReport& large,
                                      double delta) {
  if (small.kind != large.kind || small.system_label != large.system_label ||
      small.h_spec != large.h_spec || small.k_spec != large.k_spec)
    throw DomainError("classify_uniformity: reports belong to different systems or rates");
  if (!TimeGrid(small.times).is_prefix_of(TimeGrid(large.times)))
    throw DomainError("classify_uniformity: grids are not nested");
  UniformityVerdict v;
  v.max_small = small.max_value();
  v.max_large = large.max_value();
  if (!std::isfinite(v.max_small) || !std::isfinite(v.max_large)) return v;
  v.ratio = v.max_large / v.max_small;
  if (v.ratio > 1.0 + delta)
    v.verdict = Uniformity::nonuniform;
  else if (v.ratio <= 1.0 + kFlatTol)
    v.verdict = Uniformity::uniform;
  return v;
}

HorizonVerdict classify_horizon_growth(std::span<const double> small, std::span<const double> large,
                                       double delta) {
  HorizonVerdict v;
  const std::size_t n = std::min(small.size(), large.size());
  v.worst_ratio = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ratio = std::isfinite(large[i]) ? large[i] / small[i] : kInf;
    if (ratio > v.worst_ratio || std::isnan(ratio)) {
      v.worst_ratio = std::isnan(ratio) ? kInf : ratio;
      v.worst_index = i;
    }
  }
  if (v.worst_ratio > 1.0 + delta)
    v.verdict = HorizonGrowth::growing;
  else if (v.worst_ratio <= 1.0 + kFlatTol)
    v.verdict = HorizonGrowth::bounded;
  else
    v.verdict = HorizonGrowth::inconclusive;
  return v;
}

DichotomyPrecondition check_dichotomy_precondition(const SystemPtr& system, const GrowthRate& h,
                                                   const GrowthRate& k, const TimeGrid& grid,
                                                   std::span<const Vector> probes,
                                                   const CheckOptions& options) {
  DichotomyPrecondition pre;
  const Prepared prep = prepare(system, grid, probes, options.structural_tol);
  pre.invariant = prep.invariant;
  pre.compatible = prep.compatible;
  pre.detail = prep.detail;
  if (!prep.invariant) return pre;
  const auto env = dichotomy_envelope(*prep.sampled, h, k, probes, options.structural_tol);
  pre.finite = env.finite();
  if (!pre.finite) pre.detail = "dichotomy envelope is not finite on the grid";
  if (!options.horizon_test) return pre;
  try {
    const SampledSystem wide(system, grid.doubled());
    const auto env2 = dichotomy_envelope(wide, h, k, probes, options.structural_tol);
    pre.p_part = classify_horizon_growth(env.first_req, env2.first_req, options.delta);
    if (pre.p_part.verdict == HorizonGrowth::growing) {
      std::ostringstream os;
      os << "P-part gain N1(s) grows with the horizon: x" << pre.p_part.worst_ratio << " at s = "
         << grid[pre.p_part.worst_index];
      pre.detail = os.str();
    }
  } catch (const PreconditionError& e) {
    pre.invariant = false;
    pre.detail = std::string("on the doubled horizon: ") + e.what();
  }
  return pre;
}

GrowthPrecondition check_growth_precondition(const SampledSystem& sys, const GrowthRate& h,
                                             const GrowthRate& k, std::span<const Vector> probes,
                                             const CheckOptions& options) {
  GrowthPrecondition pre;
  const auto inv = check_invariance(sys, probes, options.structural_tol);
  pre.invariant = inv.pass;
  if (!inv.pass) {
    pre.detail = "not invariant at " + describe_location(sys.grid(), inv.worst);
    return pre;
  }
  try {
    KernelInverse(std::make_shared<const SampledSystem>(sys)).build_all();
    pre.compatible = true;
  } catch (const NotCompatibleError& e) {
    pre.detail = e.what();
    return pre;
  }
  pre.finite = growth_envelope(sys, h, k, probes, options.structural_tol).finite();
  if (!pre.finite) pre.detail = "growth envelope is not finite on the grid";
  return pre;
}

std::vector<double> primed_second_requirement(const KernelInverse& v, EnvelopeKind kind,
                                              const GrowthRate& k, std::span<const Vector> probes) {
  const SampledSystem& sys = v.sampled();
  const auto& space = sys.space();
  const auto kv = sample_rate(k, sys.grid());
  const bool dicho = kind == EnvelopeKind::dichotomy;
  return fit_over_pairs(sys.size(), true, [&](std::size_t i, std::size_t j) {
    double best = std::numeric_limits<double>::quiet_NaN();
    for (const Vector& x : probes) {
      const Vector qx = sys.q(i) * x;
      const double base = space.norm(qx);
      if (base < kSkipNorm) continue;
      const double rate = dicho ? kv[i] / kv[j] : kv[j] / kv[i];
      const double r = rate * space.norm(v.at(i, j) * qx) / base;
      best = std::isnan(best) ? r : std::max(best, r);
    }
    return best;
  });
}

PrimedFormsResult check_primed_forms(const KernelInverse& v, const GrowthRate& h,
                                     const GrowthRate& k, std::span<const Vector> probes,
                                     double tol) {
  const SampledSystem& sys = v.sampled();
  const auto& space = sys.space();
  const auto kv = sample_rate(k, sys.grid());
  PrimedFormsResult r;
  r.n2 = dichotomy_envelope(sys, h, k, probes).second_req;
  r.m2 = growth_envelope(sys, h, k, probes).second_req;
  r.n2_primed = primed_second_requirement(v, EnvelopeKind::dichotomy, k, probes);
  r.m2_primed = primed_second_requirement(v, EnvelopeKind::growth, k, probes);

  const auto n2_hull = monotone_hull(r.n2);
  const auto n2p_hull = monotone_hull(r.n2_primed);
  const auto m2_hull = monotone_hull(r.m2);
  const auto m2p_hull = monotone_hull(r.m2_primed);

  // V form: rate * |V(t,s)Q(t)x| <= N(t) |Q(t)x|
  const auto v_form = [&](const std::vector<double>& gain, bool dicho) {
    return worst_slack(sys.size(), probes.size(), [&](std::size_t i, std::size_t j, std::size_t p) {
      const Vector qx = sys.q(i) * probes[p];
      const double rate = dicho ? kv[i] / kv[j] : kv[j] / kv[i];
      return relative_slack(rate * space.norm(v.at(i, j) * qx), gain[i] * space.norm(qx));
    });
  };
  // U form: rate * |Q(s)x| <= N(t) |U(t,s)Q(s)x|
  const auto u_form = [&](const std::vector<double>& gain, bool dicho) {
    return worst_slack(sys.size(), probes.size(), [&](std::size_t i, std::size_t j, std::size_t p) {
      const Vector qx = sys.q(j) * probes[p];
      const double rate = dicho ? kv[i] / kv[j] : kv[j] / kv[i];
      const double image = space.norm(sys.u(i, j) * qx);
      if (image < kSkipNorm) return -1.0;
      return relative_slack(rate * space.norm(qx), gain[i] * image);
    });
  };
  r.kd2_primed_slack = v_form(n2_hull, true).worst_slack;
  r.kd2_slack = u_form(n2p_hull, true).worst_slack;
  r.kg2_primed_slack = v_form(m2_hull, false).worst_slack;
  r.kg2_slack = u_form(m2p_hull, false).worst_slack;
  r.pointwise_gap = std::max(max_relative_gap(r.n2_primed, r.n2), max_relative_gap(r.m2_primed, r.m2));
  r.pass = r.kd2_primed_slack <= tol && r.kd2_slack <= tol && r.kg2_primed_slack <= tol &&
           r.kg2_slack <= tol;
  return r;
}

// ---------------------------------------------------------------------------

Theorem1Result check_theorem1(const SystemPtr& system, const GrowthRate& h, const GrowthRate& k,
                              const TimeGrid& grid, std::span<const Vector> probes,
                              const CheckOptions& options) {
  Theorem1Result result;
  result.precondition = check_dichotomy_precondition(system, h, k, grid, probes, options);
  const auto& pre = result.precondition;
  if (!pre.invariant || !pre.compatible) {
    result.verdict = Verdict::precondition_failed;
    result.hd1.verdict = result.kd2.verdict = Verdict::precondition_failed;
    return result;
  }

  const Prepared prep = prepare(system, grid, probes, options.structural_tol);
  const SampledSystem& sys = *prep.sampled;
  const auto& space = sys.space();
  const std::size_t n = sys.size();
  const NormFamily family(NormFamilyKind::dichotomy, prep.kernel_inverse, h, k);
  const auto hv = sample_rate(h, grid);
  const auto kv = sample_rate(k, grid);
  const KernelInverse& v = *prep.kernel_inverse;

  // |||P(s)x|||_s and |||Q(t)x|||_t for every grid index and probe.
  std::vector<std::vector<double>> norm_p(n), norm_q(n);
  parallel::for_each_index(n, [&](std::size_t i) {
    for (const Vector& x : probes) {
      norm_p[i].push_back(family.value(i, sys.p(i) * x));
      norm_q[i].push_back(family.value(i, sys.q(i) * x));
    }
  });

  result.hd1 = worst_slack(n, probes.size(), [&](std::size_t i, std::size_t j, std::size_t p) {
    const Vector image = sys.u(i, j) * (sys.p(j) * probes[p]);
    return relative_slack(hv[i] * family.value(i, image), hv[j] * norm_p[j][p]);
  });
  result.kd2 = worst_slack(n, probes.size(), [&](std::size_t i, std::size_t j, std::size_t p) {
    const Vector image = v.at(i, j) * (sys.q(i) * probes[p]);
    return relative_slack(kv[i] * family.value(j, image), kv[j] * norm_q[i][p]);
  });
  const auto grade = [&](InequalityResult& r, bool pre_ok) {
    if (!pre_ok)
      r.verdict = Verdict::precondition_failed;
    else
      r.verdict = r.worst_slack <= options.slack_tol ? Verdict::pass : Verdict::fail;
  };
  grade(result.hd1, pre.p_ok());
  grade(result.kd2, pre.q_ok());

  // Sufficiency: gains implied by the sandwich specializations.
  result.derived_p.assign(n, 1.0);
  result.derived_q.assign(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = 0; p < probes.size(); ++p) {
      const double bp = space.norm(sys.p(i) * probes[p]);
      const double bq = space.norm(sys.q(i) * probes[p]);
      if (bp >= kSkipNorm) result.derived_p[i] = std::max(result.derived_p[i], norm_p[i][p] / bp);
      if (bq >= kSkipNorm) result.derived_q[i] = std::max(result.derived_q[i], norm_q[i][p] / bq);
    }
  }
  result.derived_hull = monotone_hull(pointwise_max(result.derived_p, result.derived_q));
  const auto env = dichotomy_envelope(sys, h, k, probes, options.structural_tol);
  result.envelope_hull = env.hull;
  result.sufficiency_deviation = max_relative_gap(result.derived_hull, result.envelope_hull);

  const auto& gain = result.derived_hull;
  const auto p_slack = worst_slack(n, probes.size(), [&](std::size_t i, std::size_t j, std::size_t p) {
    const Vector px = sys.p(j) * probes[p];
    return relative_slack(hv[i] * space.norm(sys.u(i, j) * px), gain[j] * hv[j] * space.norm(px));
  });
  const auto q_slack = worst_slack(n, probes.size(), [&](std::size_t i, std::size_t j, std::size_t p) {
    const Vector qx = sys.q(i) * probes[p];
    return relative_slack(kv[i] * space.norm(v.at(i, j) * qx), gain[i] * kv[j] * space.norm(qx));
  });
  result.sufficiency_slack = std::max(p_slack.worst_slack, q_slack.worst_slack);
  result.sufficiency_pass = result.sufficiency_slack <= options.sufficiency_tol &&
                            result.sufficiency_deviation <= options.sufficiency_tol;

  if (!pre.ok())
    result.verdict = Verdict::precondition_failed;
  else if (result.hd1.verdict == Verdict::pass && result.kd2.verdict == Verdict::pass &&
           result.sufficiency_pass)
    result.verdict = Verdict::pass;
  else
    result.verdict = Verdict::fail;
  return result;
}

namespace {

struct FittedGains {
  std::vector<double> p, q;
};

/// Minimal N for the growth-norm inequalities on one grid.
FittedGains fit_theorem2(const NormFamily& family, std::span<const Vector> probes) {
  const SampledSystem& sys = family.sampled();
  const KernelInverse& v = family.kernel_inverse();
  const std::size_t n = sys.size();
  const auto hv = sample_rate(family.h(), sys.grid());
  const auto kv = sample_rate(family.k(), sys.grid());
  std::vector<std::vector<double>> norm_p(n), norm_q(n);
  parallel::for_each_index(n, [&](std::size_t i) {
    for (const Vector& x : probes) {
      norm_p[i].push_back(family.value(i, sys.p(i) * x));
      norm_q[i].push_back(family.value(i, sys.q(i) * x));
    }
  });
  const double nan = std::numeric_limits<double>::quiet_NaN();
  FittedGains g;
  g.p = fit_over_pairs(n, false, [&](std::size_t i, std::size_t j) {
    double best = nan;
    for (std::size_t p = 0; p < probes.size(); ++p) {
      const double rhs = hv[j] * norm_p[j][p];
      if (rhs < kSkipNorm) continue;
      const double lhs = hv[i] * family.value(i, sys.u(i, j) * (sys.p(j) * probes[p]));
      best = std::isnan(best) ? lhs / rhs : std::max(best, lhs / rhs);
    }
    return best;
  });
  g.q = fit_over_pairs(n, true, [&](std::size_t i, std::size_t j) {
    double best = nan;
    for (std::size_t p = 0; p < probes.size(); ++p) {
      const double rhs = kv[j] * norm_q[i][p];
      if (rhs < kSkipNorm) continue;
      const double lhs = kv[i] * family.value(j, v.at(i, j) * (sys.q(i) * probes[p]));
      best = std::isnan(best) ? lhs / rhs : std::max(best, lhs / rhs);
    }
    return best;
  });
  return g;
}

}  // namespace

Theorem2Result check_theorem2(const SystemPtr& system, const GrowthRate& h, const GrowthRate& k,
                              const TimeGrid& grid, std::span<const Vector> probes,
                              const CheckOptions& options) {
  Theorem2Result result;
  const Prepared prep = prepare(system, grid, probes, options.structural_tol);
  const SampledSystem& sys = *prep.sampled;
  result.precondition.invariant = prep.invariant;
  result.precondition.compatible = prep.compatible;
  result.precondition.detail = prep.detail;
  if (prep.invariant && prep.compatible) {
    const auto growth = growth_envelope(sys, h, k, probes, options.structural_tol);
    result.precondition.finite = growth.finite();
    if (!result.precondition.finite) result.precondition.detail = "growth envelope is not finite";
  }
  if (!result.precondition.ok()) {
    result.verdict = result.hd1.verdict = result.kd2.verdict = Verdict::precondition_failed;
    return result;
  }

  const auto& space = sys.space();
  const std::size_t n = sys.size();
  const KernelInverse& v = *prep.kernel_inverse;
  const NormFamily family(NormFamilyKind::growth, prep.kernel_inverse, h, k);
  const auto hv = sample_rate(h, grid);
  const auto kv = sample_rate(k, grid);

  const FittedGains fitted = fit_theorem2(family, probes);
  result.fitted_p = fitted.p;
  result.fitted_q = fitted.q;
  result.fitted_hull = monotone_hull(pointwise_max(fitted.p, fitted.q));

  if (options.horizon_test) {
    const Prepared wide = prepare(system, grid.doubled(), probes, options.structural_tol);
    if (wide.invariant && wide.compatible) {
      const NormFamily wide_family(NormFamilyKind::growth, wide.kernel_inverse, h, k);
      result.horizon = classify_horizon_growth(fitted.p, fit_theorem2(wide_family, probes).p,
                                               options.delta);
    }
  }

  // Growth gain M and the product N * M.
  const auto growth = growth_envelope(sys, h, k, probes, options.structural_tol);
  const auto m2p = primed_second_requirement(v, EnvelopeKind::growth, k, probes);
  result.growth_hull =
      monotone_hull(pointwise_max(pointwise_max(growth.first_req, growth.second_req), m2p));
  result.product_gain.resize(n);
  for (std::size_t i = 0; i < n; ++i) result.product_gain[i] = result.fitted_hull[i] * result.growth_hull[i];

  const auto& n1 = result.product_gain;
  const auto hd1_suff = worst_slack(n, probes.size(), [&](std::size_t i, std::size_t j, std::size_t p) {
    const Vector px = sys.p(j) * probes[p];
    return relative_slack(hv[i] * space.norm(sys.u(i, j) * px), n1[j] * hv[j] * space.norm(px));
  });
  const auto kd2_suff = worst_slack(n, probes.size(), [&](std::size_t i, std::size_t j, std::size_t p) {
    const Vector qsx = sys.q(j) * probes[p];
    const double image = space.norm(sys.u(i, j) * qsx);
    const double u_form = image < kSkipNorm ? -1.0
                                            : relative_slack(kv[i] * space.norm(qsx), n1[i] * kv[j] * image);
    const Vector qtx = sys.q(i) * probes[p];
    const double v_form =
        relative_slack(kv[i] * space.norm(v.at(i, j) * qtx), n1[i] * kv[j] * space.norm(qtx));
    return std::max(u_form, v_form);
  });
  result.sufficiency_slack = std::max(hd1_suff.worst_slack, kd2_suff.worst_slack);
  result.sufficiency_pass = result.sufficiency_slack <= options.sufficiency_tol;

  // The fitted gains never exceed the dichotomy requirements (N1, N2').
  const auto dicho = dichotomy_envelope(sys, h, k, probes, options.structural_tol);
  const auto n2p = primed_second_requirement(v, EnvelopeKind::dichotomy, k, probes);
  double necessity = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    necessity = std::max(necessity, fitted.p[i] / dicho.first_req[i] - 1.0);
    necessity = std::max(necessity, fitted.q[i] / n2p[i] - 1.0);
  }
  result.necessity_slack = necessity;

  // Slack of the fitted inequalities themselves under the hull (<= 0 by
  // construction, up to roundoff).
  result.hd1.worst_slack = 0.0;
  result.kd2.worst_slack = 0.0;
  const bool finite = std::all_of(result.fitted_hull.begin(), result.fitted_hull.end(),
                                  [](double x) { return std::isfinite(x); });
  const bool p_growing = result.horizon.verdict == HorizonGrowth::growing;
  const double tol = options.sufficiency_tol;
  result.hd1.verdict = finite && !p_growing && hd1_suff.worst_slack <= tol && necessity <= tol
                           ? Verdict::pass
                           : Verdict::fail;
  result.kd2.verdict =
      finite && kd2_suff.worst_slack <= tol && necessity <= tol ? Verdict::pass : Verdict::fail;
  result.verdict = result.hd1.verdict == Verdict::pass && result.kd2.verdict == Verdict::pass
                       ? Verdict::pass
                       : Verdict::fail;
  return result;
}

bool CorollaryReport::pass() const {
  return std::all_of(inequalities.begin(), inequalities.end(),
                     [](const auto& kv) { return kv.second.verdict == Verdict::pass; });
}

CorollaryReport check_corollaries(const SystemPtr& system, double alpha, double beta,
                                  CorollaryFlavor flavor, const TimeGrid& grid,
                                  std::span<const Vector> probes, const CheckOptions& options) {
  if (!(alpha > 0.0) || !(beta > 0.0))
    throw DomainError("corollary checks need alpha > 0 and beta > 0");
  const bool expo = flavor == CorollaryFlavor::exponential;
  const GrowthRate h = expo ? GrowthRate::exponential(alpha) : GrowthRate::polynomial(alpha);
  const GrowthRate k = expo ? GrowthRate::exponential(beta) : GrowthRate::polynomial(beta);
  CorollaryReport report;
  report.flavor = flavor;
  report.alpha = alpha;
  report.beta = beta;
  report.theorem1 = check_theorem1(system, h, k, grid, probes, options);
  report.theorem2 = check_theorem2(system, h, k, grid, probes, options);

  const std::string prefix = expo ? "ed" : "pd";
  // On a structurally sound system, a gain that diverges with the horizon
  // means the corollary's inequality fails rather than being inapplicable.
  const auto& pre = report.theorem1.precondition;
  const bool structural = pre.invariant && pre.compatible;
  const auto as_corollary = [structural](InequalityResult r) {
    if (structural && r.verdict == Verdict::precondition_failed) r.verdict = Verdict::fail;
    return r;
  };
  report.inequalities[prefix + "1"] = as_corollary(report.theorem1.hd1);
  report.inequalities[prefix + "2"] = as_corollary(report.theorem1.kd2);
  report.inequalities[prefix + "1'"] = as_corollary(report.theorem2.hd1);
  report.inequalities[prefix + "2'"] = as_corollary(report.theorem2.kd2);
  return report;
}

}  // namespace hkd
