#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "owl2vec4oa/alignment.hpp"
#include "owl2vec4oa/projection.hpp"

namespace owl2vec4oa {

/// Index into the graph's IRI interner. Vertex IRIs occupy [0, |V|), so a
/// VertexId is also the TermId of that vertex's IRI.
using TermId = std::uint32_t;
using VertexId = std::uint32_t;

struct Edge {
  TermId label;
  VertexId target;
  double weight;
  friend bool operator==(const Edge&, const Edge&) = default;
};

class EmptyFrontier : public std::runtime_error {
 public:
  explicit EmptyFrontier(const std::string& vertex)
      : std::runtime_error("vertex has no outgoing edges: " + vertex) {}
};

/// Out-degree above which a vertex gets a guide table for O(1) expected sampling.
inline constexpr std::size_t kGuideTableThreshold = 64;

/// Merged labeled weighted graph G = (V, E, U, W). Immutable once built.
class WeightedGraph {
 public:
  std::size_t vertex_count() const noexcept { return vertex_count_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::size_t term_count() const noexcept { return terms_.size(); }

  const std::string& term(TermId id) const { return terms_.at(id); }
  std::optional<TermId> find_term(std::string_view iri) const;
  std::optional<VertexId> find_vertex(std::string_view iri) const;

  /// uri(G, v)
  const std::string& uri(VertexId v) const { return terms_.at(v); }
  /// uri(G, l)
  const std::string& uri(const Edge& e) const { return terms_.at(e.label); }
  /// weight(G, l)
  static double weight(const Edge& e) noexcept { return e.weight; }

  /// Sorted by (target IRI, label IRI).
  std::span<const Edge> out_edges(VertexId v) const;
  /// Prefix sums of out_edges(v) weights.
  std::span<const double> cumulative_weights(VertexId v) const;

  /// Inverse-CDF draw of one outgoing edge index of `v` for uniform u in [0, 1).
  /// Precondition: v has at least one outgoing edge.
  std::size_t sample_out_edge(VertexId v, double u) const;

  friend bool operator==(const WeightedGraph& a, const WeightedGraph& b) {
    return a.vertex_count_ == b.vertex_count_ && a.terms_ == b.terms_ &&
           a.offsets_ == b.offsets_ && a.edges_ == b.edges_;
  }

 private:
  friend class GraphBuilder;

  std::size_t vertex_count_ = 0;
  std::vector<std::string> terms_;
  std::unordered_map<std::string, TermId> term_index_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Edge> edges_;
  std::vector<double> cumulative_;
  // Per-vertex guide tables, only for vertices above kGuideTableThreshold.
  std::unordered_map<VertexId, std::vector<std::uint32_t>> guides_;
};

/// Accumulates vertices and edges; duplicate (source, label, target) keeps
/// the max weight, self-loops are dropped (their vertex is still kept).
class GraphBuilder {
 public:
  void add_vertex(const std::string& iri);
  /// Throws std::invalid_argument unless weight is in (0, 1].
  void add_edge(const std::string& source, const std::string& label, const std::string& target,
                double weight);
  WeightedGraph build() const;

 private:
  std::map<std::string, bool, std::less<>> vertices_;  // value unused
  std::map<std::tuple<std::string, std::string, std::string>, double> edges_;  // (s, t, l)
};

/// Ontology edges keep their weight (1.0 from projection); Equivalence mappings
/// add both directions with weight c, Subsumption adds (e, rdfs:subClassOf, e').
WeightedGraph merge(std::span<const std::vector<ProjectedEdge>> projections,
                    const MappingSet& mappings);

/// Pr(l_j) = weight(l_j) / sum_i weight(l_i) over the out-edges of u.
/// Throws EmptyFrontier when u has no outgoing edges.
std::vector<std::pair<Edge, double>> transition_distribution(const WeightedGraph& g, VertexId u);

// Inverse-CDF primitives; both return the first index whose cumulative
// weight exceeds u * total, clamped to the last edge.
std::size_t inverse_cdf_linear(std::span<const double> cumulative, double u);
std::vector<std::uint32_t> build_guide_table(std::span<const double> cumulative);
std::size_t inverse_cdf_guided(std::span<const double> cumulative,
                               std::span<const std::uint32_t> guide, double u);

/// Edge rows "source \t label \t target \t weight"; isolated vertices as a
/// single-column row holding the IRI.
std::string format_graph_tsv(const WeightedGraph& g);
WeightedGraph parse_graph_tsv(std::string_view text);

}  // namespace owl2vec4oa
