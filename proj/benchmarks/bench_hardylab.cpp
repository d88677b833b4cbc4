#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "hardylab/grammar.hpp"
#include "hardylab/hardy.hpp"
#include "hardylab/kedlaya.hpp"
#include "hardylab/means.hpp"
#include "hardylab/numerics.hpp"
#include "hardylab/properties.hpp"
#include "hardylab/rho.hpp"

namespace {

std::vector<double> sample_vector(std::size_t length) {
  std::mt19937_64 rng(hardylab::stream_seed(99, length));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> x(length);
  for (double& v : x) {
    v = 0.001 * std::exp(unit(rng) * 6.0);
  }
  return x;
}

void BM_EvalPowerMean(benchmark::State& state) {
  const hardylab::MeanExpr e = hardylab::parse_mean("P[0]");
  const std::vector<double> x = sample_vector(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(hardylab::eval_mean(e, x));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EvalPowerMean)->Arg(16)->Arg(256)->Arg(4096)->Complexity();

void BM_EvalSquareMix(benchmark::State& state) {
  const hardylab::MeanExpr e = hardylab::parse_mean("sq(P[0],P[-1])");
  const std::vector<double> x = sample_vector(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(hardylab::eval_mean(e, x));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EvalSquareMix)->Arg(16)->Arg(64)->Arg(256)->Complexity();

void BM_PrefixMeansFactorized(benchmark::State& state) {
  const hardylab::MeanExpr e = hardylab::parse_mean("sq(P[0.5],P[0])");
  const std::vector<double> x = sample_vector(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(hardylab::prefix_means(e, x));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PrefixMeansFactorized)->Arg(64)->Arg(512)->Arg(4096)->Complexity();

void BM_PrefixMeansPairSweep(benchmark::State& state) {
  const hardylab::MeanExpr e = hardylab::parse_mean("sq(P[0.5],P[-1])");
  const std::vector<double> x = sample_vector(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(hardylab::prefix_means(e, x));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PrefixMeansPairSweep)->Arg(64)->Arg(256)->Arg(1024)->Complexity();

void BM_HarmonicLowerBound(benchmark::State& state) {
  const hardylab::MeanExpr e = hardylab::parse_mean("P[0]");
  const long n_max = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hardylab::harmonic_lower_bound(e, n_max));
  }
}
BENCHMARK(BM_HarmonicLowerBound)->Arg(1000)->Arg(10000);

void BM_HardyNLower(benchmark::State& state) {
  const hardylab::MeanExpr e = hardylab::parse_mean("P[0]");
  hardylab::OptimizerConfig cfg;
  cfg.restarts = 8;
  cfg.iterations = 300;
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(hardylab::hardy_n_lower(e, n, cfg));
  }
}
BENCHMARK(BM_HardyNLower)->Arg(2)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_RhoQuadrature(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(hardylab::rho(0.0, -1.0, 1e-6));
  }
}
BENCHMARK(BM_RhoQuadrature);

void BM_KedlayaBuild(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(hardylab::kedlaya::build(n));
  }
}
BENCHMARK(BM_KedlayaBuild)->Arg(3)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_KedlayaVerify(benchmark::State& state) {
  const hardylab::kedlaya::KedlayaMatrix matrix =
      hardylab::kedlaya::build(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(hardylab::kedlaya::verify(matrix));
  }
}
BENCHMARK(BM_KedlayaVerify)->Arg(4)->Arg(5);

void BM_AuditSymmetry(benchmark::State& state) {
  const hardylab::MeanExpr e = hardylab::parse_mean("sq(P[0],P[-1])");
  const int trials = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(hardylab::audit_symmetry(e, trials, 7));
  }
  state.SetItemsProcessed(state.iterations() * trials);
}
BENCHMARK(BM_AuditSymmetry)->Arg(100)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
