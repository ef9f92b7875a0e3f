#include <benchmark/benchmark.h>

#include <random>

#include "enscal/bma.hpp"
#include "enscal/distributions.hpp"
#include "enscal/emos.hpp"
#include "enscal/forecast_data.hpp"

using namespace enscal;

namespace {

TrainingWindow random_window(int n_cases, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> base(285.0, 3.0);
  std::normal_distribution<double> g(0.0, 1.0);
  TrainingWindow w;
  w.target_date = parse_date("2018-01-01");
  w.hour = 12;
  w.length_days = n_cases;
  for (int i = 0; i < n_cases; ++i) {
    ForecastCase c;
    c.date = w.target_date - std::chrono::days{n_cases - i};
    c.hour = 12;
    c.station_id = 1;
    const double m = base(rng);
    for (auto& f : c.members) f = m + g(rng);
    c.observation = m + 1.5 * g(rng);
    w.cases.push_back(std::move(c));
  }
  return w;
}

void BM_CrpsNormal(benchmark::State& state) {
  NormalPredictive d{283.4, 1.7};
  double x = 282.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(crps(d, x));
    x += 1e-6;
  }
}
BENCHMARK(BM_CrpsNormal);

void BM_CrpsMixture(benchmark::State& state) {
  MixturePredictive d;
  d.weights.fill(1.0 / kEnsembleSize);
  for (int k = 0; k < kEnsembleSize; ++k) d.means[k] = 280.0 + 0.7 * k;
  d.sigma = 1.3;
  double x = 282.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(crps(d, x));
    x += 1e-6;
  }
}
BENCHMARK(BM_CrpsMixture);

void BM_CrpsEnsemble(benchmark::State& state) {
  std::array<double, kEnsembleSize> m = {281, 282.5, 283, 283.2, 284, 284.1, 285, 286, 287};
  double x = 283.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(crps_ensemble(m, x));
    x += 1e-6;
  }
}
BENCHMARK(BM_CrpsEnsemble);

void BM_EmosObjective(benchmark::State& state) {
  auto w = random_window(int(state.range(0)), 1);
  EmosParams p;
  p.a.fill(1.0 / kEnsembleSize);
  p.b0 = p.b1 = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(emos_mean_crps(p, w));
}
BENCHMARK(BM_EmosObjective)->Arg(110)->Arg(380)->Arg(1000);

void BM_EmosFit(benchmark::State& state) {
  auto w = random_window(int(state.range(0)), 2);
  EmosFitOptions o;
  o.min_cases = 1;
  for (auto _ : state) benchmark::DoNotOptimize(fit_emos(w, o));
}
BENCHMARK(BM_EmosFit)->Arg(110)->Arg(380)->Unit(benchmark::kMillisecond);

void BM_BmaFit(benchmark::State& state) {
  auto w = random_window(int(state.range(0)), 3);
  EmOptions o;
  o.min_cases = 1;
  for (auto _ : state) benchmark::DoNotOptimize(fit_bma(w, BiasMode::kFull, o));
}
BENCHMARK(BM_BmaFit)->Arg(270)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_MixtureQuantile(benchmark::State& state) {
  MixturePredictive d;
  d.weights.fill(1.0 / kEnsembleSize);
  for (int k = 0; k < kEnsembleSize; ++k) d.means[k] = 280.0 + 0.7 * k;
  d.sigma = 1.3;
  double p = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(quantile(d, p));
    p = p < 0.9 ? p + 1e-7 : 0.1;
  }
}
BENCHMARK(BM_MixtureQuantile);

}  // namespace

BENCHMARK_MAIN();
