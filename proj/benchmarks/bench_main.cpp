#include <benchmark/benchmark.h>

#include "hitchin/defaults.hpp"
#include "hitchin/inversion.hpp"
#include "hitchin/sov.hpp"

using namespace hitchin;

namespace {

const PeriodData& periods(Family f) {
  static const PeriodData sl2 = compute_periods(default_curve(Family::SL2));
  static const PeriodData so4 = compute_periods(default_curve(Family::SO4));
  return f == Family::SL2 ? sl2 : so4;
}

Family family(const benchmark::State& s) { return s.range(0) == 0 ? Family::SL2 : Family::SO4; }

void BM_Periods(benchmark::State& state) {
  const SpectralCurve c = default_curve(family(state));
  for (auto _ : state) benchmark::DoNotOptimize(compute_periods(c));
}
BENCHMARK(BM_Periods)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_AbelPrym(benchmark::State& state) {
  const PeriodData& pd = periods(family(state));
  const auto g = random_configuration(pd.curve, 1);
  for (auto _ : state) benchmark::DoNotOptimize(abel_prym(pd, g));
}
BENCHMARK(BM_AbelPrym)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ThetaJet(benchmark::State& state) {
  const PeriodData& pd = periods(Family::SL2);
  const ThetaContext ctx(pd.tau);
  const CVector z = abel_point(pd, random_configuration(pd.curve, 2).points[0]);
  const int d = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(ctx.jet(z, d));
  state.counters["points"] = static_cast<double>(ctx.lattice_size(z, d));
}
BENCHMARK(BM_ThetaJet)->DenseRange(0, 6, 2)->Unit(benchmark::kMillisecond);

void BM_ThetaSO4(benchmark::State& state) {
  const PeriodData& pd = periods(Family::SO4);
  ThetaOptions to;
  to.target_eps = 1e-10;
  const ThetaContext ctx(pd.tau, to);
  const CVector z = abel_point(pd, random_configuration(pd.curve, 2).points[0]);
  for (auto _ : state) benchmark::DoNotOptimize(ctx.jet(z, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_ThetaSO4)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_OdeFlow(benchmark::State& state) {
  const SpectralCurve c = default_curve(family(state));
  const auto g = random_configuration(c, 3);
  for (auto _ : state) benchmark::DoNotOptimize(ode_flow(c, g, 0, {0.0, 0.1}));
}
BENCHMARK(BM_OdeFlow)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SigmaSL2(benchmark::State& state) {
  const PeriodData& pd = periods(Family::SL2);
  const ThetaContext ctx(pd.tau);
  const PrymInverter inv(pd, ctx);
  const auto cal = inv.calibrate(random_configuration(pd.curve, 3));
  for (auto _ : state) benchmark::DoNotOptimize(inv.sigma(cal, cal.phi0));
}
BENCHMARK(BM_SigmaSL2)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
