#include <benchmark/benchmark.h>

#include <random>

#include "gsci/directci.hpp"
#include "gsci/scan.hpp"
#include "gsci/symci.hpp"

using namespace gsci;

namespace {

const CodeGraph& symci_code() {
  static const CodeGraph g = cat_graph(3, 3);
  return g;
}

const CodeGraph& direct_code() {
  static const CodeGraph g = [] {
    std::mt19937_64 rng(5);
    std::bernoulli_distribution edge(0.4);
    std::vector<VertexMask> adj(16, 0);
    for (int i = 0; i < 16; ++i)
      for (int j = i + 1; j < 16; ++j)
        if (j == i + 1 || edge(rng)) adj[i] |= bit(j), adj[j] |= bit(i);
    return CodeGraph(12, adj);
  }();
  return g;
}

const PauliParams kPoint(0.85, 0.05, 0.05, 0.05);

void BM_symci_serial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(symmetric_lambda_serial(symci_code()));
}

void BM_symci_parallel(benchmark::State& state) {
  SymmetricOptions opts;
  opts.threads = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(symmetric_lambda(symci_code(), opts));
}

void BM_direct_serial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(direct_ci_serial(direct_code(), kPoint));
}

void BM_direct_parallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(direct_ci(direct_code(), kPoint));
}

void BM_surface(benchmark::State& state, bool parallel) {
  static const CISpectrum s = symmetric_lambda(repetition_graph(7));
  ScanOptions opts;
  opts.parallel = parallel;
  for (auto _ : state) benchmark::DoNotOptimize(surface(s, 17, opts));
}

}  // namespace

BENCHMARK(BM_symci_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_symci_parallel)->Arg(0)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_direct_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_direct_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_surface, serial, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_surface, parallel, true)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
