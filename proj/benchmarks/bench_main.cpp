#include <random>

#include <benchmark/benchmark.h>

#include "playerkern/gp_classifier.hpp"
#include "playerkern/simulate.hpp"

namespace {

using namespace playerkern;

std::vector<MatchVector> league_vectors(int rounds, std::vector<Outcome>* ys = nullptr) {
  SimConfig cfg;
  cfg.matches_per_team = rounds;
  const auto sim = simulate_dataset(cfg);
  if (ys) {
    ys->clear();
    for (const auto& r : sim.dataset.records()) ys->push_back(r.outcome);
  }
  return build_match_vectors(sim.dataset);
}

void BM_GramMatrix(benchmark::State& state) {
  const auto xs = league_vectors(static_cast<int>(state.range(0)));
  const auto p = make_kernel_params(0.04, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(gram_matrix(xs, p, true));
  state.SetLabel("N=" + std::to_string(xs.size()));
}
BENCHMARK(BM_GramMatrix)->Arg(20)->Arg(60)->Arg(120)->Unit(benchmark::kMillisecond);

void BM_LaplaceFit(benchmark::State& state) {
  std::vector<Outcome> ys;
  const auto xs = league_vectors(static_cast<int>(state.range(0)), &ys);
  const auto hyper = make_hyperparams(0.04, 0.1, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(fit(xs, ys, hyper));
  state.SetLabel("N=" + std::to_string(xs.size()));
}
BENCHMARK(BM_LaplaceFit)->Arg(20)->Arg(60)->Arg(120)->Unit(benchmark::kMillisecond);

void BM_PredictOutcomes(benchmark::State& state) {
  std::vector<Outcome> ys;
  const auto xs = league_vectors(60, &ys);
  const auto post = fit(xs, ys, make_hyperparams(0.04, 0.1, 0.5));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(predict_outcomes(post, xs[i]));
    i = (i + 1) % xs.size();
  }
}
BENCHMARK(BM_PredictOutcomes)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
