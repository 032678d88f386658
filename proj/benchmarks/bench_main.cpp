#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "owl2vec4oa/graph.hpp"
#include "owl2vec4oa/ntriples.hpp"
#include "owl2vec4oa/random.hpp"
#include "owl2vec4oa/sgns.hpp"
#include "owl2vec4oa/walker.hpp"

using namespace owl2vec4oa;

namespace {

WeightedGraph star_graph(std::size_t degree) {
  GraphBuilder b;
  SplitMix64 rng(1);
  for (std::size_t i = 0; i < degree; ++i) {
    b.add_edge("http://b/hub", "http://b/l", "http://b/t" + std::to_string(i),
               0.01 + 0.99 * rng.uniform());
  }
  return b.build();
}

void BM_SampleOutEdge(benchmark::State& state) {
  auto g = star_graph(static_cast<std::size_t>(state.range(0)));
  const VertexId hub = *g.find_vertex("http://b/hub");
  SplitMix64 rng(2);
  for (auto _ : state) benchmark::DoNotOptimize(g.sample_out_edge(hub, rng.uniform()));
}
BENCHMARK(BM_SampleOutEdge)->Arg(4)->Arg(64)->Arg(65)->Arg(1024)->Arg(16384);

void BM_GenerateWalks(benchmark::State& state) {
  GraphBuilder b;
  SplitMix64 rng(3);
  std::vector<std::string> seeds;
  for (int v = 0; v < 2000; ++v) {
    seeds.push_back("http://b/v" + std::to_string(v));
    for (int k = 0; k < 4; ++k) {
      b.add_edge(seeds.back(), "http://b/l", "http://b/v" + std::to_string(rng.below(2000)), 1.0);
    }
  }
  auto g = b.build();
  const auto workers = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_walks(g, seeds, {.walk_depth = 4, .iterations = 5}, workers));
  }
}
BENCHMARK(BM_GenerateWalks)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_SgnsStep(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  SgnsParameters<float> p(1000, dim);
  SplitMix64 rng(4);
  for (auto& x : p.input) x = static_cast<float>(rng.uniform() - 0.5) / static_cast<float>(dim);
  std::vector<TokenIndex> neg(5);
  for (auto _ : state) {
    for (auto& n : neg) n = static_cast<TokenIndex>(rng.below(1000));
    benchmark::DoNotOptimize(sgns_step(p, static_cast<TokenIndex>(rng.below(1000)),
                                       static_cast<TokenIndex>(rng.below(1000)),
                                       std::span<const TokenIndex>(neg), 0.025f));
  }
}
BENCHMARK(BM_SgnsStep)->Arg(32)->Arg(100)->Arg(300);

void BM_ParseNTriples(benchmark::State& state) {
  std::string doc;
  for (int i = 0; i < 20000; ++i) {
    doc += "<http://b/c" + std::to_string(i) + "> <http://www.w3.org/2000/01/rdf-schema#label> \"class " +
           std::to_string(i) + "\"@en .\n";
    doc += "<http://b/c" + std::to_string(i) + "> <http://www.w3.org/2000/01/rdf-schema#subClassOf> <http://b/c" +
           std::to_string(i / 2) + "> .\n";
  }
  const auto workers = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(parse_document(doc, {.workers = workers}));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * doc.size()));
}
BENCHMARK(BM_ParseNTriples)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
