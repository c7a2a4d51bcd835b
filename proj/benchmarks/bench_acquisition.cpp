#include "tsal/acquisition.hpp"
#include "tsal/gp.hpp"
#include "tsal/safe_optimizer.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace tsal;

namespace {

GpModel make_model(int n, Eigen::Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  Mat x(n, d);
  Vec y(n);
  for (int i = 0; i < n; ++i) {
    for (Eigen::Index h = 0; h < d; ++h) x(i, h) = u(rng);
    y[i] = u(rng);
  }
  GpModel m(SeArdKernel(Vec::Constant(d, 0.7), 1.0, 0.1), 0.0, x, y);
  m.fit();
  return m;
}

FiniteMeasure box(Eigen::Index d) { return FiniteMeasure::uniform_box(Vec::Constant(d, -3), Vec::Constant(d, 3)); }

void BM_Evaluate(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const GpModel m = make_model(n, 2, 1);
  const auto ws = AcquisitionWorkspace::build(m, acq::Imspe{box(2)});
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  Vec x(2);
  for (auto _ : state) {
    x << u(rng), u(rng);
    benchmark::DoNotOptimize(ws.try_evaluate(x));
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_Evaluate)->RangeMultiplier(2)->Range(32, 1024)->Complexity(benchmark::oNSquared);

void BM_EvaluateWithGradient(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const GpModel m = make_model(n, 2, 1);
  const auto ws = AcquisitionWorkspace::build(m, acq::Imspe{box(2)});
  Vec x(2);
  x << 0.1, -0.2;
  Vec g;
  for (auto _ : state) benchmark::DoNotOptimize(ws.evaluate_with_gradient(x, g));
}
BENCHMARK(BM_EvaluateWithGradient)->RangeMultiplier(4)->Range(32, 512);

void BM_BuildWorkspace(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const GpModel m = make_model(n, 3, 1);
  for (auto _ : state) benchmark::DoNotOptimize(AcquisitionWorkspace::build(m, acq::Imspe{box(3)}));
  state.SetComplexityN(n);
}
BENCHMARK(BM_BuildWorkspace)->RangeMultiplier(2)->Range(32, 512)->Complexity();

void BM_Fit(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  GpModel m = make_model(n, 3, 1);
  for (auto _ : state) {
    m.fit();
    benchmark::DoNotOptimize(m.weights().data());
  }
}
BENCHMARK(BM_Fit)->RangeMultiplier(2)->Range(32, 512);

void BM_NegativeLogPosteriorGradient(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const GpModel m = make_model(n, 3, 1);
  const HyperPriors pri = HyperPriors::shared(3, {0.0, 1.0}, {0.5, 1.0}, {-3.0, 1.0}, {0.0, 1.0});
  Vec g;
  for (auto _ : state) benchmark::DoNotOptimize(negative_log_posterior(m, pri, &g));
}
BENCHMARK(BM_NegativeLogPosteriorGradient)->RangeMultiplier(2)->Range(32, 256);

void BM_SelectNext(benchmark::State& state) {
  const GpModel m = make_model(40, 2, 3);
  const auto ws = AcquisitionWorkspace::build(m, acq::Imspe{box(2)});
  const Box domain{Vec::Constant(2, -3), Vec::Constant(2, 3)};
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(select_next(ws, nullptr, step::None{}, domain, seed++));
}
BENCHMARK(BM_SelectNext);

}  // namespace

BENCHMARK_MAIN();
