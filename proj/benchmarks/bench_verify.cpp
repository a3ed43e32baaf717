#include <benchmark/benchmark.h>

#include "hkd/lyap_norms.hpp"
#include "hkd/verify.hpp"

namespace {

using namespace hkd;

const GrowthRate kExp1 = GrowthRate::exponential(1.0);

std::shared_ptr<const SampledSystem> sampled(std::string_view name, std::size_t points) {
  return std::make_shared<const SampledSystem>(example_gallery(name), TimeGrid::uniform(10.0, points));
}

void BM_Sample(benchmark::State& state) {
  const auto sys = example_gallery("dicho-2d-repaired");
  const auto grid = TimeGrid::uniform(10.0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(SampledSystem(sys, grid));
}
BENCHMARK(BM_Sample)->Arg(51)->Arg(101)->Arg(201)->Unit(benchmark::kMillisecond);

void BM_DichotomyEnvelope(benchmark::State& state) {
  const auto s = sampled("dicho-2d-repaired", static_cast<std::size_t>(state.range(0)));
  const auto probes = standard_probes(s->space());
  for (auto _ : state) benchmark::DoNotOptimize(dichotomy_envelope(*s, kExp1, kExp1, probes));
}
BENCHMARK(BM_DichotomyEnvelope)->Arg(51)->Arg(101)->Arg(201)->Unit(benchmark::kMillisecond);

void BM_KernelInverseBuild(benchmark::State& state) {
  const auto s = sampled("dicho-2d-repaired", static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    KernelInverse v(s);
    v.build_all();
  }
}
BENCHMARK(BM_KernelInverseBuild)->Arg(51)->Arg(101)->Unit(benchmark::kMillisecond);

void BM_NormValue(benchmark::State& state) {
  const auto s = sampled("dicho-2d-repaired", 101);
  auto v = std::make_shared<const KernelInverse>(s);
  v->build_all();
  const NormFamily family(NormFamilyKind::dichotomy, v, kExp1, kExp1);
  const Vector x{{0.3, -0.7}};
  for (auto _ : state) benchmark::DoNotOptimize(family.value(50, x));
}
BENCHMARK(BM_NormValue);

void BM_Theorem1(benchmark::State& state) {
  const auto sys = example_gallery("dicho-2d-constantP");
  const auto grid = TimeGrid::uniform(10.0, static_cast<std::size_t>(state.range(0)));
  const auto probes = standard_probes(sys->space());
  for (auto _ : state) benchmark::DoNotOptimize(check_theorem1(sys, kExp1, kExp1, grid, probes));
}
BENCHMARK(BM_Theorem1)->Arg(51)->Arg(101)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
