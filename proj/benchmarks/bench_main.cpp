#include <benchmark/benchmark.h>

#include <map>

#include "sigraph/background.hpp"
#include "sigraph/description.hpp"
#include "sigraph/interestingness.hpp"
#include "sigraph/search.hpp"
#include "sigraph/synthetic.hpp"

namespace {

using namespace sigraph;

struct Fixture {
  SyntheticDataset data;
  BackgroundModel model;
  std::vector<Selector> selectors;
};

const Fixture& fixture(std::size_t n) {
  static std::map<std::size_t, Fixture> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    SynthParams p;
    p.n = n;
    p.flags = 16;
    p.group_size = n / 8;
    p.blocks = {parse_planted_block("group=0:group=1:0.3")};
    auto data = generate_synthetic(p);
    auto model = fit_degree_prior(data.graph);
    auto selectors = generate_selectors(data.graph);
    it = cache.emplace(n, Fixture{std::move(data), std::move(model), std::move(selectors)}).first;
  }
  return it->second;
}

void BM_DegreeFit(benchmark::State& state) {
  SynthParams p;
  p.n = static_cast<std::size_t>(state.range(0));
  p.group_size = p.n / 8;
  const auto g = generate_synthetic(p).graph;
  for (auto _ : state) benchmark::DoNotOptimize(fit_degree_prior(g));
}
BENCHMARK(BM_DegreeFit)->Arg(200)->Arg(400)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_ScoreBiPattern(benchmark::State& state) {
  const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
  const PatternScorer scorer(f.data.graph, f.model, ScoreConstants{});
  const auto w1 = parse_description("group=0", f.data.graph);
  const auto w2 = parse_description("flag0=1", f.data.graph);
  const auto e1 = extension(w1, f.data.graph), e2 = extension(w2, f.data.graph);
  for (auto _ : state) benchmark::DoNotOptimize(scorer.score_bi(w1, e1, w2, e2));
}
BENCHMARK(BM_ScoreBiPattern)->Arg(400)->Arg(1600);

void BM_Extension(benchmark::State& state) {
  const auto& f = fixture(1600);
  const auto w = parse_description("flag0=1 \xE2\x88\xA7 flag1=0", f.data.graph);
  for (auto _ : state) benchmark::DoNotOptimize(extension(w, f.data.graph));
}
BENCHMARK(BM_Extension);

void BM_SingleSearch(benchmark::State& state) {
  const auto& f = fixture(400);
  SearchConfig cfg;
  cfg.beam_width = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(beam_search_single(f.data.graph, f.model, f.selectors, cfg));
}
BENCHMARK(BM_SingleSearch)->Arg(5)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_NestedSearch(benchmark::State& state) {
  const auto& f = fixture(400);
  SearchConfig cfg;
  cfg.x1 = 4;
  cfg.x2 = 3;
  for (auto _ : state) benchmark::DoNotOptimize(nested_beam_search(f.data.graph, f.model, f.selectors, cfg));
}
BENCHMARK(BM_NestedSearch)->Unit(benchmark::kMillisecond);

}  // namespace
