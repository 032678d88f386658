#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "owl2vec4oa/graph.hpp"

namespace owl2vec4oa {

struct WalkConfig {
  std::size_t walk_depth = 3;   // vertex budget per walk
  std::size_t iterations = 1;
  std::uint64_t rng_seed = 42;

  /// Throws std::invalid_argument when walk_depth or iterations is zero.
  void validate() const;
};

/// Alternating vertex / edge-label term ids, starting at the seed vertex.
struct Walk {
  std::vector<TermId> tokens;
  std::size_t vertex_count() const noexcept { return (tokens.size() + 1) / 2; }
  friend bool operator==(const Walk&, const Walk&) = default;
};

struct WalkResult {
  std::vector<Walk> walks;      // iteration-major, then seed order
  std::size_t skipped_seeds = 0;  // seeds with no vertex in the graph
};

/// Seed for the random stream of walk (iteration, seed_index).
std::uint64_t walk_stream_seed(std::uint64_t rng_seed, std::uint64_t iteration,
                               std::uint64_t seed_index) noexcept;

/// Biased random walks from every seed, `iterations` times. Each step draws one uniform variate and
/// picks an outgoing edge with probability proportional to its weight.
/// Output is identical for any `workers` value.
WalkResult generate_walks(const WeightedGraph& g, std::span<const std::string> seeds,
                          const WalkConfig& cfg, unsigned workers = 1);

/// A single walk from `start` using the stream seeded with `stream_seed`.
Walk random_walk(const WeightedGraph& g, VertexId start, std::size_t walk_depth,
                 std::uint64_t stream_seed);

std::vector<std::string> walk_iris(const WeightedGraph& g, const Walk& walk);

/// One walk per line, IRIs space-separated, LF-terminated.
std::string format_walks(const WeightedGraph& g, std::span<const Walk> walks);

}  // namespace owl2vec4oa
