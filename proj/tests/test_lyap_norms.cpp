#include "hkd/lyap_norms.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hkd/errors.hpp"
#include "oracles.hpp"

namespace hkd {
namespace {

Vector vec2(double a, double b) { return Vector{{a, b}}; }

NormFamily make_family(NormFamilyKind kind, std::string_view example, double horizon = 5.0,
                       std::size_t points = 51) {
  const auto sys = example_gallery(example);
  auto sampled = std::make_shared<const SampledSystem>(sys, TimeGrid::uniform(horizon, points));
  auto v = std::make_shared<const KernelInverse>(sampled);
  return NormFamily(kind, v, GrowthRate::exponential(1.0), GrowthRate::exponential(1.0));
}

TEST(GrowthNorm, GrowthNotDichoAtOrigin) {
  const auto f = make_family(NormFamilyKind::growth, "growth-not-dicho");
  EXPECT_NEAR(growth_norm(f, 0.0, vec2(1, 0)), 1.0, 1e-14);
}

TEST(DichotomyNorm, ConstantProjectorAtOrigin) {
  const auto f = make_family(NormFamilyKind::dichotomy, "dicho-2d-constantP");
  EXPECT_NEAR(dichotomy_norm(f, 0.0, vec2(1, 0)), 1.0, 1e-14);
}

TEST(DichotomyNorm, ZeroVector) {
  const auto f = make_family(NormFamilyKind::dichotomy, "dicho-2d-repaired");
  EXPECT_EQ(dichotomy_norm(f, 1.0, vec2(0, 0)), 0.0);
}

TEST(DichotomyNorm, UnstableRangeAtOrigin) {
  // only tau = 0 contributes, so the value is |Q(0)x|
  const auto f = make_family(NormFamilyKind::dichotomy, "dicho-2d-repaired");
  const auto sys = example_gallery("dicho-2d-repaired");
  const Vector x = sys->q(0.0) * vec2(0.25, 0.75);
  EXPECT_NEAR(dichotomy_norm(f, 0.0, x), f.sampled().space().norm(x), 1e-14);
}

TEST(DichotomyNorm, ConstantProjectorClosedForm) {
  // P-term collapses to |x1|; Q-term is max_{tau <= t} r(t)/r(tau) |x2| = r(t)|x2|
  const auto f = make_family(NormFamilyKind::dichotomy, "dicho-2d-constantP");
  for (double t : {0.0, 1.0, 2.5, 5.0}) {
    EXPECT_NEAR(dichotomy_norm(f, t, vec2(0.5, 0.0)), 0.5, 1e-14);
    EXPECT_NEAR(dichotomy_norm(f, t, vec2(0.0, 2.0)) / (2.0 * oracle::r(t)), 1.0, 1e-13);
  }
}

TEST(NormFamily, OffGridAndKindMismatch) {
  const auto f = make_family(NormFamilyKind::growth, "dicho-2d-constantP");
  EXPECT_THROW(growth_norm(f, 0.05, vec2(1, 0)), DomainError);
  EXPECT_THROW(dichotomy_norm(f, 0.0, vec2(1, 0)), ContractError);
  const auto g = make_family(NormFamilyKind::dichotomy, "dicho-2d-constantP");
  EXPECT_THROW(growth_norm(g, 0.0, vec2(1, 0)), ContractError);
}

TEST(NormFamily, ProjectedIdentities) {
  for (auto kind : {NormFamilyKind::growth, NormFamilyKind::dichotomy})
    for (auto name : {"dicho-2d-repaired", "dicho-2d-constantP", "growth-not-dicho"}) {
      const auto f = make_family(kind, name, 3.0, 31);
      const auto probes = standard_probes(f.sampled().space());
      const auto c = check_projected_identities(f, probes, 1e-12);
      EXPECT_TRUE(c.pass()) << name << " " << to_string(kind) << " p=" << c.p_identity.worst_relative
                            << " q=" << c.q_identity.worst_relative;
    }
}

TEST(NormFamily, SandwichWithLogpolyGain) {
  const GainFunction bound = [](double t) { return oracle::r(t); };
  {
    const auto f = make_family(NormFamilyKind::dichotomy, "dicho-2d-constantP");
    const auto probes = standard_probes(f.sampled().space());
    const auto c = check_compatibility_sandwich(f, bound, probes, 1e-12);
    EXPECT_TRUE(c.pass) << c.worst_inequality << " " << c.worst_margin;
  }
  {
    const auto f = make_family(NormFamilyKind::growth, "growth-not-dicho");
    const auto probes = standard_probes(f.sampled().space());
    const auto c = check_compatibility_sandwich(f, bound, probes, 1e-12);
    EXPECT_TRUE(c.pass) << c.worst_inequality << " " << c.worst_margin;
  }
}

TEST(NormFamily, SandwichFailsUnderTooSmallGain) {
  const auto f = make_family(NormFamilyKind::dichotomy, "dicho-2d-constantP");
  const auto probes = standard_probes(f.sampled().space());
  const auto c = check_compatibility_sandwich(f, [](double) { return 1.0; }, probes, 1e-12);
  EXPECT_FALSE(c.pass);
  EXPECT_GT(c.worst_margin, 0.0);
}

TEST(NormFamily, NormAxioms) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  for (auto kind : {NormFamilyKind::growth, NormFamilyKind::dichotomy}) {
    const auto f = make_family(kind, "dicho-2d-repaired", 3.0, 31);
    for (int trial = 0; trial < 200; ++trial) {
      const std::size_t i = static_cast<std::size_t>(trial) % f.grid().size();
      const Vector x = vec2(dist(rng), dist(rng));
      const Vector y = vec2(dist(rng), dist(rng));
      const double a = dist(rng);
      const double nx = f.value(i, x), ny = f.value(i, y);
      EXPECT_GT(nx, 0.0);
      EXPECT_NEAR(f.value(i, a * x), std::abs(a) * nx, 1e-12 * (1.0 + std::abs(a) * nx));
      EXPECT_LE(f.value(i, x + y), (nx + ny) * (1.0 + 1e-12));
      // dominates the base norm (tau = t term)
      EXPECT_GE(nx * (1.0 + 1e-12), f.sampled().space().norm(x));
    }
  }
}

TEST(NormFamily, RefiningTheGridOnlyIncreasesTheValue) {
  const auto coarse = make_family(NormFamilyKind::dichotomy, "dicho-2d-repaired", 4.0, 5);
  const auto fine = make_family(NormFamilyKind::dichotomy, "dicho-2d-repaired", 4.0, 41);
  const auto probes = standard_probes(coarse.sampled().space());
  for (std::size_t i = 0; i < coarse.grid().size(); ++i)
    for (const auto& x : probes) {
      const double t = coarse.grid()[i];
      EXPECT_LE(coarse(t, x), fine(t, x) * (1.0 + 1e-12));
    }
}

TEST(NormFamily, ValueIsBruteForceSupremumOverGrid) {
  const auto f = make_family(NormFamilyKind::growth, "dicho-2d-repaired", 2.0, 9);
  const auto sys = example_gallery("dicho-2d-repaired");
  const auto& grid = f.grid();
  const StateSpace space(2);
  const Vector x = vec2(0.7, -0.4);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double t = grid[i];
    double p = 0.0, q = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      const double tau = grid[j];
      if (tau >= t)
        p = std::max(p, std::exp(t - tau) * space.norm(sys->u(tau, t) * sys->p(t) * x));
      if (tau <= t)
        q = std::max(q, std::exp(tau - t) *
                            space.norm(build_kernel_inverse(*sys, t, tau) * sys->q(t) * x));
    }
    EXPECT_NEAR(f.value(i, x), p + q, 1e-12 * (p + q));
  }
}

}  // namespace
}  // namespace hkd
