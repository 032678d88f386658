#include "owl2vec4oa/walker.hpp"

#include <algorithm>
#include <stdexcept>
#include <thread>

#include "owl2vec4oa/random.hpp"

namespace owl2vec4oa {

namespace {
constexpr std::uint64_t kWalkSalt = 0x77616C6B;  // "walk"
}

void WalkConfig::validate() const {
  if (walk_depth < 1) throw std::invalid_argument("walk_depth must be >= 1");
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
}

std::uint64_t walk_stream_seed(std::uint64_t rng_seed, std::uint64_t iteration,
                               std::uint64_t seed_index) noexcept {
  return derive_seed(rng_seed, {kWalkSalt, iteration, seed_index});
}

Walk random_walk(const WeightedGraph& g, VertexId start, std::size_t walk_depth,
                 std::uint64_t stream_seed) {
  SplitMix64 rng(stream_seed);
  Walk walk;
  walk.tokens.reserve(2 * walk_depth - 1);
  walk.tokens.push_back(start);
  VertexId focus = start;
  for (std::size_t size = 1; size < walk_depth; ++size) {
    auto edges = g.out_edges(focus);
    if (edges.empty()) break;
    const Edge& e = edges[g.sample_out_edge(focus, rng.uniform())];
    walk.tokens.push_back(e.label);
    walk.tokens.push_back(e.target);
    focus = e.target;
  }
  return walk;
}

WalkResult generate_walks(const WeightedGraph& g, std::span<const std::string> seeds,
                          const WalkConfig& cfg, unsigned workers) {
  cfg.validate();
  WalkResult result;

  // Seed indices in the stream derivation refer to positions in the caller's
  // seed list, so dropping absent seeds does not shift other streams.
  std::vector<std::pair<std::size_t, VertexId>> present;
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    if (auto v = g.find_vertex(seeds[s])) {
      present.emplace_back(s, *v);
    } else {
      ++result.skipped_seeds;
    }
  }

  const std::size_t units = cfg.iterations * present.size();
  result.walks.resize(units);
  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t unit = begin; unit < end; ++unit) {
      const std::size_t k = unit / present.size();
      const auto& [seed_index, vertex] = present[unit % present.size()];
      result.walks[unit] =
          random_walk(g, vertex, cfg.walk_depth, walk_stream_seed(cfg.rng_seed, k, seed_index));
    }
  };

  const std::size_t threads = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(units, 1));
  if (threads == 1) {
    run(0, units);
  } else {
    std::vector<std::jthread> pool;
    const std::size_t per = (units + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
      const std::size_t b = std::min(units, t * per);
      const std::size_t e = std::min(units, b + per);
      pool.emplace_back(run, b, e);
    }
  }
  return result;
}

std::vector<std::string> walk_iris(const WeightedGraph& g, const Walk& walk) {
  std::vector<std::string> out;
  out.reserve(walk.tokens.size());
  for (TermId t : walk.tokens) out.push_back(g.term(t));
  return out;
}

std::string format_walks(const WeightedGraph& g, std::span<const Walk> walks) {
  std::string out;
  for (const auto& walk : walks) {
    for (std::size_t i = 0; i < walk.tokens.size(); ++i) {
      if (i) out += ' ';
      out += g.term(walk.tokens[i]);
    }
    out += '\n';
  }
  return out;
}

}  // namespace owl2vec4oa
