// Serial reference vs OpenMP kernels on synthetic columns.

#include <benchmark/benchmark.h>

#include <map>
#include <random>
#include <vector>

#include "rai/kernels.hpp"
#include "rai/mitigate.hpp"

namespace {

struct Columns {
  std::vector<std::uint8_t> y, p;
  std::vector<std::int32_t> g, c;
  std::vector<double> s;
};

const Columns& columns(std::size_t n) {
  static std::map<std::size_t, Columns> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::mt19937_64 rng(n);
  Columns d;
  for (std::size_t i = 0; i < n; ++i) {
    d.y.push_back(rng() & 1);
    d.p.push_back((rng() >> 7) & 1);
    d.g.push_back(std::int32_t(rng() % 4));
    d.c.push_back(std::int32_t(rng() % 16));
    d.s.push_back(double(rng() % 10001) / 10000.0);
  }
  return cache.emplace(n, std::move(d)).first->second;
}

template <bool Parallel>
void BM_confusion(benchmark::State& state) {
  const auto& d = columns(std::size_t(state.range(0)));
  for (auto _ : state) {
    auto r = Parallel ? rai::kernels::confusion_counts(d.y, d.p, d.g, 4)
                      : rai::kernels::confusion_counts_serial(d.y, d.p, d.g, 4);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_contingency(benchmark::State& state) {
  const auto& d = columns(std::size_t(state.range(0)));
  for (auto _ : state) {
    auto r = Parallel ? rai::kernels::contingency(d.g, 4, d.c, 16)
                      : rai::kernels::contingency_serial(d.g, 4, d.c, 16);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_threshold_sweep(benchmark::State& state) {
  const auto& d = columns(std::size_t(state.range(0)));
  const auto grid = rai::uniform_grid(101);
  for (auto _ : state) {
    auto r = Parallel ? rai::kernels::threshold_counts(d.s, d.y, d.g, 4, grid)
                      : rai::kernels::threshold_counts_serial(d.s, d.y, d.g, 4, grid);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_confusion<false>)->Name("confusion/serial")->Range(1 << 12, 1 << 22);
BENCHMARK(BM_confusion<true>)->Name("confusion/openmp")->Range(1 << 12, 1 << 22);
BENCHMARK(BM_contingency<false>)->Name("contingency/serial")->Range(1 << 12, 1 << 22);
BENCHMARK(BM_contingency<true>)->Name("contingency/openmp")->Range(1 << 12, 1 << 22);
BENCHMARK(BM_threshold_sweep<false>)->Name("threshold_sweep/serial")->Range(1 << 12, 1 << 20);
BENCHMARK(BM_threshold_sweep<true>)->Name("threshold_sweep/openmp")->Range(1 << 12, 1 << 20);

BENCHMARK_MAIN();
