#include <benchmark/benchmark.h>

#include "lcrip/ensembles.hpp"
#include "lcrip/operator_norm.hpp"
#include "lcrip/recovery.hpp"
#include "lcrip/sparse_norms.hpp"
#include "lcrip/spectra.hpp"

using namespace lcrip;

namespace {

Eigen::MatrixXd exponential_matrix(std::size_t n, std::size_t N, std::uint64_t seed) {
  return sample_matrix(EnsembleSpec(EnsembleKind::ExponentialProduct, N), n, RngStream{seed, 0})
      .matrix();
}

void BM_SampleMatrix(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const EnsembleSpec spec(EnsembleKind::ExponentialProduct, n);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_matrix(spec, n, RngStream{++seed, 0}));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_SampleMatrix)->RangeMultiplier(4)->Range(16, 1024);

void BM_OperatorNorm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Eigen::MatrixXd a = exponential_matrix(n, n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(operator_norm(a));
}
BENCHMARK(BM_OperatorNorm)->RangeMultiplier(4)->Range(8, 512);

void BM_TopMNorm(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const Eigen::MatrixXd x = exponential_matrix(1, N, 2);
  const std::span<const double> view(x.data(), N);
  for (auto _ : state) benchmark::DoNotOptimize(top_m_norm(view, N / 8));
}
BENCHMARK(BM_TopMNorm)->RangeMultiplier(8)->Range(64, 32768);

void BM_AkmExact(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const Eigen::MatrixXd a = exponential_matrix(12, 14, 3);
  for (auto _ : state) benchmark::DoNotOptimize(akm_exact(a, k, 3));
}
BENCHMARK(BM_AkmExact)->DenseRange(1, 6);

void BM_AkmProfile(benchmark::State& state) {
  const Eigen::MatrixXd a = exponential_matrix(10, 12, 4);
  for (auto _ : state) benchmark::DoNotOptimize(akm_profile(a, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_AkmProfile)->Arg(2)->Arg(3);

void BM_DeltaExact(benchmark::State& state) {
  const Eigen::MatrixXd a = exponential_matrix(16, 24, 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(delta_m_exact(a, static_cast<std::size_t>(state.range(0))));
  }
}
BENCHMARK(BM_DeltaExact)->DenseRange(1, 3);

void BM_BasisPursuit(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const std::size_t n = N / 4;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    state.PauseTiming();
    const RngStream stream{++seed, 0};
    state.ResumeTiming();
    benchmark::DoNotOptimize(
        recovery_trial(EnsembleSpec(EnsembleKind::GaussianProduct, N), n, N, n / 16, stream));
  }
}
BENCHMARK(BM_BasisPursuit)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
