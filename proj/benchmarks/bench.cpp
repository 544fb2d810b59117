#include <random>

#include <benchmark/benchmark.h>

#include "hkg/graph.hpp"
#include "hkg/quality.hpp"

namespace {

std::vector<hkg::NodeDegree> random_degrees(std::size_t n) {
  std::mt19937_64 rng(n);
  std::vector<hkg::NodeDegree> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({"v" + std::to_string(i), rng() % 51});
  return out;
}

hkg::TupleSet gold(std::size_t n) {
  hkg::TupleSet out;
  std::size_t entities = 8;
  while (entities * (entities - 1) / 2 < 4 * n) ++entities;
  for (std::size_t a = 0; a < entities && out.size() < n; ++a) {
    for (std::size_t b = a + 1; b < entities && out.size() < n; b += 3) {
      hkg::Tuple t;
      t.entity1 = "e" + std::to_string(a);
      t.entity2 = "e" + std::to_string(b);
      t.relation = "rel " + std::to_string(out.size());
      t.snippet = t.relation;
      t.anchor = {"doc", {out.size(), out.size() + 1}};
      out.push_back(t);
    }
  }
  return out;
}

void BM_CentralConcepts(benchmark::State& state) {
  const auto nodes = random_degrees(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(hkg::extract_central_concepts(nodes));
}
BENCHMARK(BM_CentralConcepts)->Arg(100)->Arg(1000)->Arg(10000);

void BM_Degrade(benchmark::State& state) {
  const auto g = gold(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(hkg::degrade(g, {0.7, 0.31, 1}));
}
BENCHMARK(BM_Degrade)->Arg(500)->Arg(2957);

void BM_DegradeAndScore(benchmark::State& state) {
  const auto g = gold(2957);
  for (auto _ : state) benchmark::DoNotOptimize(hkg::score(hkg::degrade(g, {0.7, 0.31, 1}), g));
}
BENCHMARK(BM_DegradeAndScore);

void BM_BuildKg(benchmark::State& state) {
  const auto g = gold(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(hkg::build_kg(g));
}
BENCHMARK(BM_BuildKg)->Arg(2957);

}  // namespace

BENCHMARK_MAIN();
