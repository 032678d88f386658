#include "owl2vec4oa/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "owl2vec4oa/text_io.hpp"

namespace owl2vec4oa {

std::optional<TermId> WeightedGraph::find_term(std::string_view iri) const {
  auto it = term_index_.find(std::string(iri));
  if (it == term_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<VertexId> WeightedGraph::find_vertex(std::string_view iri) const {
  auto id = find_term(iri);
  if (!id || *id >= vertex_count_) return std::nullopt;
  return *id;
}

std::span<const Edge> WeightedGraph::out_edges(VertexId v) const {
  return std::span<const Edge>(edges_).subspan(offsets_.at(v), offsets_.at(v + 1) - offsets_[v]);
}

std::span<const double> WeightedGraph::cumulative_weights(VertexId v) const {
  return std::span<const double>(cumulative_).subspan(offsets_.at(v),
                                                      offsets_.at(v + 1) - offsets_[v]);
}

std::size_t WeightedGraph::sample_out_edge(VertexId v, double u) const {
  auto cum = cumulative_weights(v);
  if (cum.size() > kGuideTableThreshold) {
    return inverse_cdf_guided(cum, guides_.at(v), u);
  }
  return inverse_cdf_linear(cum, u);
}

std::size_t inverse_cdf_linear(std::span<const double> cumulative, double u) {
  const double r = u * cumulative.back();
  for (std::size_t i = 0; i < cumulative.size(); ++i) {
    if (r < cumulative[i]) return i;
  }
  return cumulative.size() - 1;
}

std::vector<std::uint32_t> build_guide_table(std::span<const double> cumulative) {
  const std::size_t m = cumulative.size();
  const double total = cumulative.back();
  std::vector<std::uint32_t> guide(m);
  std::size_t i = 0;
  for (std::size_t j = 0; j < m; ++j) {
    const double threshold = (static_cast<double>(j) / static_cast<double>(m)) * total;
    while (i + 1 < m && cumulative[i] <= threshold) ++i;
    guide[j] = static_cast<std::uint32_t>(i);
  }
  return guide;
}

std::size_t inverse_cdf_guided(std::span<const double> cumulative,
                               std::span<const std::uint32_t> guide, double u) {
  const std::size_t m = cumulative.size();
  const double r = u * cumulative.back();
  std::size_t j = static_cast<std::size_t>(u * static_cast<double>(m));
  if (j >= m) j = m - 1;
  std::size_t i = guide[j];
  // Rounding in u * m can put the guide past the answer; fall back to bisection.
  if (i > 0 && cumulative[i - 1] > r) {
    i = static_cast<std::size_t>(
        std::upper_bound(cumulative.begin(), cumulative.begin() + static_cast<std::ptrdiff_t>(i), r) -
        cumulative.begin());
  }
  while (i < m && cumulative[i] <= r) ++i;
  return i < m ? i : m - 1;
}

void GraphBuilder::add_vertex(const std::string& iri) { vertices_.try_emplace(iri, true); }

void GraphBuilder::add_edge(const std::string& source, const std::string& label,
                            const std::string& target, double weight) {
  if (!(weight > 0.0 && weight <= 1.0)) {
    throw std::invalid_argument("edge weight outside (0, 1]: " + std::to_string(weight));
  }
  add_vertex(source);
  add_vertex(target);
  if (source == target) return;
  auto [it, inserted] = edges_.try_emplace({source, target, label}, weight);
  if (!inserted) it->second = std::max(it->second, weight);
}

WeightedGraph GraphBuilder::build() const {
  WeightedGraph g;
  g.vertex_count_ = vertices_.size();
  g.terms_.reserve(vertices_.size());
  for (const auto& [iri, unused] : vertices_) g.terms_.push_back(iri);

  std::set<std::string, std::less<>> labels;
  for (const auto& [key, w] : edges_) {
    const std::string& label = std::get<2>(key);
    if (!vertices_.contains(label)) labels.insert(label);
  }
  for (const auto& label : labels) g.terms_.push_back(label);
  for (std::size_t i = 0; i < g.terms_.size(); ++i) {
    g.term_index_.emplace(g.terms_[i], static_cast<TermId>(i));
  }

  // edges_ is ordered by (source, target, label), which is exactly the
  // per-vertex adjacency order.
  g.offsets_.assign(g.vertex_count_ + 1, 0);
  g.edges_.reserve(edges_.size());
  for (const auto& [key, w] : edges_) {
    const auto& [s, t, l] = key;
    const VertexId src = g.term_index_.at(s);
    g.offsets_[src + 1]++;
    g.edges_.push_back(Edge{g.term_index_.at(l), g.term_index_.at(t), w});
  }
  for (std::size_t v = 0; v < g.vertex_count_; ++v) g.offsets_[v + 1] += g.offsets_[v];

  g.cumulative_.resize(g.edges_.size());
  for (VertexId v = 0; v < g.vertex_count_; ++v) {
    double acc = 0.0;
    for (std::size_t i = g.offsets_[v]; i < g.offsets_[v + 1]; ++i) {
      acc += g.edges_[i].weight;
      g.cumulative_[i] = acc;
    }
    if (g.offsets_[v + 1] - g.offsets_[v] > kGuideTableThreshold) {
      g.guides_.emplace(v, build_guide_table(g.cumulative_weights(v)));
    }
  }
  return g;
}

WeightedGraph merge(std::span<const std::vector<ProjectedEdge>> projections,
                    const MappingSet& mappings) {
  GraphBuilder builder;
  for (const auto& edges : projections) {
    for (const auto& e : edges) {
      builder.add_edge(e.source.str(), e.label.str(), e.target.str(), e.weight);
    }
  }
  const std::string equivalent(vocab::kOwlEquivalentClass);
  const std::string subclass(vocab::kRdfsSubClassOf);
  for (const auto& m : mappings) {
    if (m.relation == Relation::Equivalence) {
      builder.add_edge(m.source.str(), equivalent, m.target.str(), m.confidence);
      builder.add_edge(m.target.str(), equivalent, m.source.str(), m.confidence);
    } else {
      builder.add_edge(m.source.str(), subclass, m.target.str(), m.confidence);
    }
  }
  return builder.build();
}

std::vector<std::pair<Edge, double>> transition_distribution(const WeightedGraph& g, VertexId u) {
  auto edges = g.out_edges(u);
  if (edges.empty()) throw EmptyFrontier(g.uri(u));
  double total = 0.0;
  for (const auto& e : edges) total += WeightedGraph::weight(e);
  std::vector<std::pair<Edge, double>> dist;
  dist.reserve(edges.size());
  for (const auto& e : edges) dist.emplace_back(e, WeightedGraph::weight(e) / total);
  return dist;
}

std::string format_graph_tsv(const WeightedGraph& g) {
  std::vector<bool> touched(g.vertex_count(), false);
  std::string out;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    for (const auto& e : g.out_edges(v)) {
      touched[v] = touched[e.target] = true;
      out += g.uri(v);
      out += '\t';
      out += g.uri(e);
      out += '\t';
      out += g.uri(e.target);
      out += '\t';
      out += format_real(e.weight);
      out += '\n';
    }
  }
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (!touched[v]) {
      out += g.uri(v);
      out += '\n';
    }
  }
  return out;
}

WeightedGraph parse_graph_tsv(std::string_view text) {
  GraphBuilder builder;
  std::size_t row = 0;
  for (std::string_view line : split_lines(text)) {
    ++row;
    if (line.empty()) continue;
    auto f = split_fields(line);
    double w = 0;
    if (f.size() == 1 && is_valid_iri(f[0])) {
      builder.add_vertex(std::string(f[0]));
    } else if (f.size() == 4 && is_valid_iri(f[0]) && is_valid_iri(f[1]) && is_valid_iri(f[2]) &&
               parse_real(f[3], w)) {
      builder.add_edge(std::string(f[0]), std::string(f[1]), std::string(f[2]), w);
    } else {
      throw std::runtime_error("graph row " + std::to_string(row) + ": malformed");
    }
  }
  return builder.build();
}

}  // namespace owl2vec4oa
