// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "hkd/cli.hpp"
#include "hkd/errors.hpp"
#include "hkd/lyap_norms.hpp"
#include "hkd/verify.hpp"

using namespace hkd;

namespace {

constexpr double kR10 = 27.9734451965026797676585935491;
constexpr double kR20 = 65.5865693121645229827082077087;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& what) {
    if (pass) detail += (detail.empty() ? "" : "; ") + what;
  }
};

std::string num(double v) { return cli::format_number(v); }

bool within_rel(double actual, double expected, double rel) {
  return std::abs(actual - expected) <= rel * std::abs(expected);
}

const GrowthRate kExp1 = GrowthRate::exponential(1.0);

Outcome nonuniform_example() {
  Outcome o;
  const auto sys = example_gallery("dicho-2d-constantP");
  const SampledSystem sampled(sys, TimeGrid::uniform(10.0, 101));
  const auto probes = standard_probes(sys->space());
  const auto env = dichotomy_envelope(sampled, kExp1, kExp1, probes);
  double worst = 0.0;
  for (std::size_t i = 0; i < env.times.size(); ++i) worst = std::max(worst, env.first_req[i] / logpoly(env.times[i]));
  o.require(worst <= 1.0 + 1e-9, "N1_req(s)/r(s) reaches " + num(worst));
  const double n2 = env.second_req.back();
  o.require(within_rel(n2, kR10, 0.01), "N2_req(10) = " + num(n2));
  o.require(env.times[env.second_argmax.back()] == 0.0, "N2_req(10) attained away from s = 0");
  o.note("max N1/r = " + num(worst) + ", N2_req(10) = " + num(n2) + " at s = 0");
  return o;
}

Outcome nonuniformity_verdict() {
  Outcome o;
  const auto sys = example_gallery("dicho-2d-constantP");
  const auto probes = standard_probes(sys->space());
  const auto grid = TimeGrid::uniform(10.0, 101);
  const auto small = dichotomy_envelope(SampledSystem(sys, grid), kExp1, kExp1, probes);
  const auto large = dichotomy_envelope(SampledSystem(sys, grid.doubled()), kExp1, kExp1, probes);
  const auto v = classify_uniformity(small, large);
  o.require(v.verdict == Uniformity::nonuniform, "verdict " + std::string(to_string(v.verdict)));
  o.require(within_rel(v.max_small, kR10, 0.01), "max at T=10 is " + num(v.max_small));
  o.require(within_rel(v.max_large, kR20, 0.01), "max at T=20 is " + num(v.max_large));
  o.note("nonuniform, max " + num(v.max_small) + " -> " + num(v.max_large));
  return o;
}

Outcome growth_without_dichotomy() {
  Outcome o;
  const GrowthRate r = GrowthRate::log_polynomial();
  GalleryOptions opts;
  opts.h = opts.k = r;
  const auto sys = example_gallery("growth-not-dicho", opts);
  const auto probes = standard_probes(sys->space());
  const auto grid = TimeGrid::uniform(10.0, 101);
  const auto wide = grid.doubled();
  const auto witness = class_g_witness(r, r, wide.points());
  o.require(witness.pass && std::abs(witness.worst_margin - 1.0) <= 1e-12,
            "class-G margin " + num(witness.worst_margin));
  const auto growth = growth_envelope(SampledSystem(sys, wide), r, r, probes);
  double worst = 0.0;
  for (std::size_t i = 0; i < growth.times.size(); ++i)
    worst = std::max(worst, std::max(growth.first_req[i], growth.second_req[i]) / logpoly(growth.times[i]));
  o.require(worst <= 1.0 + 1e-6, "M_req/r reaches " + num(worst));
  const auto d_small = dichotomy_envelope(SampledSystem(sys, grid), r, r, probes);
  const auto d_large = dichotomy_envelope(SampledSystem(sys, wide), r, r, probes);
  o.require(d_large.first_req.front() > 65.0, "N1_req(0) on [0,20] is " + num(d_large.first_req.front()));
  const auto hz = classify_horizon_growth(d_small.first_req, d_large.first_req);
  o.require(hz.verdict == HorizonGrowth::growing, "N1_req classified " + std::string(to_string(hz.verdict)));
  o.note("max M/r = " + num(worst) + ", N1_req(0) = " + num(d_large.first_req.front()) + ", growing");
  return o;
}

Outcome theorem1_necessity() {
  Outcome o;
  int checked = 0;
  for (auto name : kGalleryNames) {
    const auto sys = example_gallery(name);
    const auto probes = standard_probes(sys->space());
    const auto t1 = check_theorem1(sys, kExp1, kExp1, TimeGrid::default_grid(), probes);
    if (!t1.precondition.ok()) continue;
    ++checked;
    const std::string n(name);
    o.require(t1.hd1.worst_slack <= 1e-9, n + " hd1 slack " + num(t1.hd1.worst_slack));
    o.require(t1.kd2.worst_slack <= 1e-9, n + " kd2 slack " + num(t1.kd2.worst_slack));
    o.require(t1.sufficiency_deviation <= 1e-6, n + " recovered gain off by " + num(t1.sufficiency_deviation));
    o.require(t1.sufficiency_slack <= 1e-6, n + " recovered gain slack " + num(t1.sufficiency_slack));
  }
  o.require(checked > 0, "no gallery system passes the precondition");
  o.note(std::to_string(checked) + " systems pass the precondition, all slack within tolerance");
  return o;
}

Outcome theorem2_product() {
  Outcome o;
  CheckOptions opts;
  opts.horizon_test = false;  // not needed for the sufficiency path
  int checked = 0;
  for (auto name : kGalleryNames) {
    const auto sys = example_gallery(name);
    const auto probes = standard_probes(sys->space());
    const auto t2 = check_theorem2(sys, kExp1, kExp1, TimeGrid::default_grid(), probes, opts);
    if (!t2.precondition.ok()) continue;
    ++checked;
    o.require(t2.sufficiency_slack <= 1e-6, std::string(name) + " product gain slack " + num(t2.sufficiency_slack));
  }
  o.require(checked > 0, "no gallery system has growth");
  o.note(std::to_string(checked) + " systems certified with N*M");
  return o;
}

Outcome structural_identities() {
  Outcome o;
  for (auto name : kGalleryNames) {
    if (name == "dicho-2d-literal") continue;
    const std::string n(name);
    const auto sys = example_gallery(name);
    const auto probes = standard_probes(sys->space());
    auto sampled = std::make_shared<const SampledSystem>(sys, TimeGrid::default_grid());
    const auto evo = check_evolution_property(*sampled, 1e-10);
    o.require(evo.pass && evo.identity_defect <= 1e-10, n + " cocycle defect " + num(evo.worst_defect));
    const auto inv = check_invariance(*sampled, probes, 1e-10);
    o.require(inv.pass, n + " invariance defect " + num(inv.worst_relative));
    KernelInverse v(sampled);
    const auto ids = check_v_identities(v, probes, 1e-10);
    o.require(ids.pass(), n + " v1-v4 defects " + num(ids.v1.worst_relative) + " " + num(ids.v2.worst_relative) +
                              " " + num(ids.v3.worst_relative) + " " + num(ids.v4.worst_relative));
  }
  const auto literal = example_gallery("dicho-2d-literal");
  const double defect = invariance_defect(*literal, 1.0, 0.0, Vector{{0.0, 1.0}});
  o.require(std::abs(defect - 1.7783) <= 1e-3, "literal defect " + num(defect));
  o.note("literal invariance defect at (1,0,(0,1)) = " + num(defect));
  return o;
}

Outcome norm_compatibility() {
  Outcome o;
  const GainFunction r = [](double t) { return logpoly(t); };
  struct Case {
    std::string_view system;
    NormFamilyKind kind;
  };
  const Case cases[] = {{"dicho-2d-constantP", NormFamilyKind::dichotomy},
                        {"dicho-2d-constantP", NormFamilyKind::growth},
                        {"growth-not-dicho", NormFamilyKind::growth}};
  for (const auto& c : cases) {
    const auto sys = example_gallery(c.system);
    const auto probes = standard_probes(sys->space());
    auto sampled = std::make_shared<const SampledSystem>(sys, TimeGrid::default_grid());
    const NormFamily family(c.kind, std::make_shared<const KernelInverse>(sampled), kExp1, kExp1);
    const std::string label = std::string(c.system) + "/" + std::string(to_string(c.kind));
    const auto sandwich = check_compatibility_sandwich(family, r, probes, 1e-12);
    o.require(sandwich.pass, label + " sandwich " + sandwich.worst_inequality + " " + num(sandwich.worst_margin));
    double worst = 0.0;
    for (std::size_t i = 0; i < family.grid().size(); ++i)
      for (const auto& x : probes) {
        const double nx = family.value(i, x);
        for (double a : {-2.5, 0.5, 3.0})
          worst = std::max(worst, std::abs(family.value(i, a * x) - std::abs(a) * nx) / (std::abs(a) * nx));
        for (const auto& y : probes) {
          const double excess = family.value(i, x + y) - (nx + family.value(i, y));
          worst = std::max(worst, excess / (nx + family.value(i, y)));
        }
      }
    o.require(worst <= 1e-12, label + " norm axioms off by " + num(worst));
  }
  o.note("sandwich with N = M = r(t) and norm axioms hold");
  return o;
}

Outcome scalar_example() {
  Outcome o;
  GalleryOptions opts;
  opts.u = ScalarProfile::exp_shift(1.0);
  const auto sys = example_gallery("scalar-ulnu", opts);
  const double u10 = sys->u(1.0, 0.0)(0, 0);
  o.require(std::abs(u10 - 0.183940) <= 1e-6, "U(1,0) = " + num(u10));
  const auto evo = check_evolution_property(SampledSystem(sys, TimeGrid::default_grid()), 1e-13);
  o.require(evo.pass, "cocycle defect " + num(evo.worst_defect));
  o.note("U(1,0) = " + num(u10) + ", cocycle defect " + num(evo.worst_defect));
  return o;
}

Outcome determinism() {
  Outcome o;
  cli::RunConfig config;
  const char* previous = std::getenv("HKDLAB_THREADS");
  const std::string saved = previous ? previous : "";
  for (auto target : {"nonuniform-example", "growth-not-dicho", "theorem1"}) {
    setenv("HKDLAB_THREADS", "1", 1);
    const auto a = cli::cmd_reproduce(target, config);
    setenv("HKDLAB_THREADS", "4", 1);
    const auto b = cli::cmd_reproduce(target, config);
    const bool same = a.report.render(cli::Format::json) == b.report.render(cli::Format::json) &&
                      a.report.render(cli::Format::csv) == b.report.render(cli::Format::csv);
    o.require(same, std::string(target) + " reports differ");
  }
  if (previous)
    setenv("HKDLAB_THREADS", saved.c_str(), 1);
  else
    unsetenv("HKDLAB_THREADS");
  o.note("reports byte-identical across runs with 1 and 4 workers");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"nonuniform example reproduction", nonuniform_example},
      {"nonuniformity verdict", nonuniformity_verdict},
      {"growth without dichotomy", growth_without_dichotomy},
      {"theorem 1 slack-free necessity", theorem1_necessity},
      {"theorem 2 product constant", theorem2_product},
      {"structural identities", structural_identities},
      {"norm-family compatibility", norm_compatibility},
      {"scalar example", scalar_example},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::printf("%s  %zu  %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), seconds,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
