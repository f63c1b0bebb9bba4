// Parallel kernels against their serial reference versions.

#include <random>

#include <benchmark/benchmark.h>

#include "patchweave/parallel.hpp"
#include "patchweave/reference.hpp"
#include "patchweave/solver.hpp"

using namespace patchweave;

namespace {

ImageGrid noisy_image(int n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> noise(0.0, 10.0);
  ImageGrid u(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) u(r, c) = ((c / 4) % 2 ? 170.0 : 80.0) + noise(rng);
  return u;
}

RegionMask centered_hole(int n, int side, int r) {
  std::vector<std::uint8_t> h(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0);
  const int o = (n - side) / 2;
  for (int i = o; i < o + side; ++i)
    for (int j = o; j < o + side; ++j) h[static_cast<std::size_t>(i * n + j)] = 1;
  return RegionMask(n, n, std::move(h), r);
}

void set_threads(const benchmark::State& state) { set_thread_count(static_cast<int>(state.range(1))); }

void BM_WeightsReference(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ImageGrid u = noisy_image(n);
  const RegionMask m = centered_hole(n, 12, 2);
  const SolverConfig cfg = default_config(10.0);
  for (auto _ : state) benchmark::DoNotOptimize(reference::update_weights(u, m, cfg.kernel, cfg.h, cfg.search));
  state.SetItemsProcessed(state.iterations() * n * n);
}

void BM_WeightsParallel(benchmark::State& state) {
  set_threads(state);
  const int n = static_cast<int>(state.range(0));
  const ImageGrid u = noisy_image(n);
  const RegionMask m = centered_hole(n, 12, 2);
  const SolverConfig cfg = default_config(10.0);
  const CandidateLayout layout = build_candidate_layout(m, cfg.search, WeightDomain::all);
  for (auto _ : state) benchmark::DoNotOptimize(update_weights(u, layout, cfg.kernel, cfg.h, cfg.search.top_k));
  state.SetItemsProcessed(state.iterations() * n * n);
  set_thread_count(0);
}

void BM_ImageReference(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ImageGrid u = noisy_image(n);
  const RegionMask m = centered_hole(n, 12, 2);
  const SolverConfig cfg = default_config(10.0);
  const WeightField w = update_weights(u, m, cfg.kernel, cfg.h, cfg.search);
  for (auto _ : state) benchmark::DoNotOptimize(reference::update_image(u, w, u, m, cfg));
  state.SetItemsProcessed(state.iterations() * n * n);
}

void BM_ImageParallel(benchmark::State& state) {
  set_threads(state);
  const int n = static_cast<int>(state.range(0));
  const ImageGrid u = noisy_image(n);
  const RegionMask m = centered_hole(n, 12, 2);
  const SolverConfig cfg = default_config(10.0);
  const WeightField w = update_weights(u, m, cfg.kernel, cfg.h, cfg.search);
  for (auto _ : state) benchmark::DoNotOptimize(update_image(u, w, u, m, cfg));
  state.SetItemsProcessed(state.iterations() * n * n);
  set_thread_count(0);
}

}  // namespace

BENCHMARK(BM_WeightsReference)->Arg(48)->Arg(96)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WeightsParallel)->ArgsProduct({{48, 96}, {1, 4}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ImageReference)->Arg(48)->Arg(96)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ImageParallel)->ArgsProduct({{48, 96}, {1, 4}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
