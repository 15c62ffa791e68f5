// Serial reference kernels against their parallel versions. Thread count
// follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "rbo/kernels.hpp"

using namespace rbo;

namespace {

std::vector<double> random_samples(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

// Semicircle weights of radius 1 on a grid of K steps per side.
std::vector<double> semicircle(int K) {
  std::vector<double> w(static_cast<std::size_t>(2 * K + 1));
  for (int k = -K; k <= K; ++k) {
    const double s = static_cast<double>(k) / K;
    w[static_cast<std::size_t>(k + K)] = std::sqrt(std::max(0.0, 1.0 - s * s));
  }
  return w;
}

using EnvelopeFn = void (*)(std::span<const double>, std::span<const double>, std::span<double>);

void run_envelope(benchmark::State& state, EnvelopeFn fn) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const int K = static_cast<int>(state.range(1));
  const auto samples = random_samples(n + 2 * static_cast<std::size_t>(K), 1);
  const auto w = semicircle(K);
  std::vector<double> out(n);
  for (auto _ : state) {
    fn(samples, w, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}

void BM_envelope_reference(benchmark::State& s) { run_envelope(s, kernels::envelope_reference); }
void BM_envelope_bruteforce(benchmark::State& s) { run_envelope(s, kernels::envelope_bruteforce); }
void BM_envelope(benchmark::State& s) { run_envelope(s, kernels::envelope); }

using DistanceFn = void (*)(const kernels::GraphSamples&, std::span<const double>, std::span<const double>, double,
                            std::span<double>);

void run_distance(benchmark::State& state, DistanceFn fn) {
  std::vector<double> y(60001);
  for (std::size_t j = 0; j < y.size(); ++j) y[j] = std::sin(1e-4 * static_cast<double>(j) * 100.0) / 10.0;
  const kernels::GraphSamples g{0.0, 1e-4, y};
  const auto q = static_cast<std::size_t>(state.range(0));
  auto qx = random_samples(q, 2);
  auto qy = random_samples(q, 3);
  for (auto& x : qx) x = 3.0 + 2.5 * x;
  std::vector<double> out(q);
  for (auto _ : state) {
    fn(g, qx, qy, 0.5, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}

void BM_windowed_distance_reference(benchmark::State& s) { run_distance(s, kernels::windowed_min_distance_reference); }
void BM_windowed_distance(benchmark::State& s) { run_distance(s, kernels::windowed_min_distance); }

using HausdorffFn = double (*)(const Matrix&, const Matrix&);

void run_hausdorff(benchmark::State& state, HausdorffFn fn) {
  const auto n = static_cast<Index>(state.range(0));
  const auto a = random_samples(static_cast<std::size_t>(2 * n), 4);
  const auto b = random_samples(static_cast<std::size_t>(2 * n), 5);
  const Matrix A = Eigen::Map<const Matrix>(a.data(), 2, n);
  const Matrix B = Eigen::Map<const Matrix>(b.data(), 2, n);
  for (auto _ : state) benchmark::DoNotOptimize(fn(A, B));
}

void BM_hausdorff_reference(benchmark::State& s) { run_hausdorff(s, kernels::directed_hausdorff_reference); }
void BM_hausdorff(benchmark::State& s) { run_hausdorff(s, kernels::directed_hausdorff); }

}  // namespace

BENCHMARK(BM_envelope_reference)->Args({20000, 2000})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_envelope_bruteforce)->Args({20000, 2000})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_envelope)->Args({20000, 2000})->Args({200000, 20000})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_windowed_distance_reference)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_windowed_distance)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_hausdorff_reference)->Arg(4000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_hausdorff)->Arg(4000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
