#include "bo/bounds.hpp"
#include "bo/experiments.hpp"
#include "bo/model.hpp"
#include "bo/solver.hpp"

#include <benchmark/benchmark.h>

#include <vector>

namespace {

bo::ProblemSpec make_problem(int n, std::size_t p) {
  std::vector<double> v(p, 1.0);
  v[0] = 50.0;
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
  mu[0] = 5.0;
  return bo::ProblemSpec{bo::make_explicit(v), mu, n, 0.1, 0.0, bo::Law::Gaussian};
}

void BM_SampleDataset(benchmark::State& st) {
  const auto ps = make_problem(static_cast<int>(st.range(0)), static_cast<std::size_t>(st.range(1)));
  std::uint64_t t = 0;
  for (auto _ : st) benchmark::DoNotOptimize(bo::sample_dataset(ps, 1, t++));
}
BENCHMARK(BM_SampleDataset)->Args({100, 2000})->Args({200, 20000})->Unit(benchmark::kMillisecond);

void BM_Gram(benchmark::State& st) {
  const auto ps = make_problem(static_cast<int>(st.range(0)), static_cast<std::size_t>(st.range(1)));
  const auto ds = bo::sample_dataset(ps, 1);
  for (auto _ : st) benchmark::DoNotOptimize(bo::gram(ds, 0.0));
}
BENCHMARK(BM_Gram)->Args({100, 2000})->Args({200, 20000})->Unit(benchmark::kMillisecond);

void BM_Decompose(benchmark::State& st) {
  const auto ps = make_problem(static_cast<int>(st.range(0)), static_cast<std::size_t>(st.range(1)));
  const auto ds = bo::sample_dataset(ps, 1);
  const auto g = bo::gram(ds, 0.0);
  for (auto _ : st) benchmark::DoNotOptimize(bo::decompose(ds, ps.mu, g));
}
BENCHMARK(BM_Decompose)->Args({100, 2000})->Args({200, 20000})->Unit(benchmark::kMillisecond);

void BM_RidgeDirect(benchmark::State& st) {
  const auto ps = make_problem(static_cast<int>(st.range(0)), static_cast<std::size_t>(st.range(1)));
  const auto ds = bo::sample_dataset(ps, 1);
  for (auto _ : st) benchmark::DoNotOptimize(bo::ridge_direct(ds, ps.mu, 0.1));
}
BENCHMARK(BM_RidgeDirect)->Args({100, 2000})->Unit(benchmark::kMillisecond);

void BM_TrialSystemBuild(benchmark::State& st) {
  const auto ps = make_problem(static_cast<int>(st.range(0)), static_cast<std::size_t>(st.range(1)));
  const auto ds = bo::sample_dataset(ps, 1);
  const Eigen::VectorXd dir = ps.mu.normalized();
  for (auto _ : st) benchmark::DoNotOptimize(bo::TrialSystem(ds, ps.spectrum, dir));
}
BENCHMARK(BM_TrialSystemBuild)->Args({100, 2000})->Args({200, 20000})->Unit(benchmark::kMillisecond);

// the per-grid-point cost once a trial is set up
void BM_TrialSystemEvaluate(benchmark::State& st) {
  const auto ps = make_problem(static_cast<int>(st.range(0)), 4000);
  const auto ds = bo::sample_dataset(ps, 1);
  const bo::TrialSystem sys(ds, ps.spectrum, ps.mu.normalized());
  double lam = 0.0;
  for (auto _ : st) {
    benchmark::DoNotOptimize(sys.evaluate(5.0, lam));
    lam = lam > 10 ? 0.0 : lam + 0.01;
  }
}
BENCHMARK(BM_TrialSystemEvaluate)->Arg(100)->Arg(200)->Unit(benchmark::kMicrosecond);

void BM_Quantities(benchmark::State& st) {
  const auto ps = make_problem(200, static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(bo::quantities(ps.spectrum, ps.mu, 200, 1, 0.0, 0.1));
}
BENCHMARK(BM_Quantities)->Arg(20000)->Arg(1000000)->Unit(benchmark::kMicrosecond);

void BM_MuthukumarRatio(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(bo::muthukumar_ratio(n, 0.75, 0.5, 1.5));
}
BENCHMARK(BM_MuthukumarRatio)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
