#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "owl2vec4oa/ntriples.hpp"

namespace owl2vec4oa {

namespace vocab {
inline constexpr std::string_view kRdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
inline constexpr std::string_view kRdfs = "http://www.w3.org/2000/01/rdf-schema#";
inline constexpr std::string_view kOwl = "http://www.w3.org/2002/07/owl#";

inline constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
inline constexpr std::string_view kRdfsLabel = "http://www.w3.org/2000/01/rdf-schema#label";
inline constexpr std::string_view kRdfsSubClassOf =
    "http://www.w3.org/2000/01/rdf-schema#subClassOf";
inline constexpr std::string_view kOwlEquivalentClass =
    "http://www.w3.org/2002/07/owl#equivalentClass";
inline constexpr std::string_view kOwlRestriction = "http://www.w3.org/2002/07/owl#Restriction";
inline constexpr std::string_view kOwlOnProperty = "http://www.w3.org/2002/07/owl#onProperty";
inline constexpr std::string_view kOwlSomeValuesFrom =
    "http://www.w3.org/2002/07/owl#someValuesFrom";
inline constexpr std::string_view kOwlAnnotationProperty =
    "http://www.w3.org/2002/07/owl#AnnotationProperty";
inline constexpr std::string_view kOboExactSynonym =
    "http://www.geneontology.org/formats/oboInOwl#hasExactSynonym";
inline constexpr std::string_view kInverseSubClassOf = "urn:owl2vec4oa:inverseSubClassOf";

/// True for IRIs in the rdf:, rdfs: or owl: namespaces.
bool is_reserved(std::string_view iri) noexcept;
}  // namespace vocab

struct ProjectedEdge {
  Iri source;
  Iri label;
  Iri target;
  double weight = 1.0;
  friend bool operator==(const ProjectedEdge&, const ProjectedEdge&) = default;
};

/// Entity IRI -> labels, primary label first. Iteration is by IRI order.
class LexicalTable {
 public:
  /// Appends `label` unless the entity already carries the identical string.
  void add(const std::string& iri, std::string label);

  /// nullptr when the entity has no label.
  const std::vector<std::string>* labels(std::string_view iri) const;
  const std::string* primary(std::string_view iri) const;

  /// Entries of `other` are appended after this table's own labels.
  void merge(const LexicalTable& other);

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

 private:
  std::map<std::string, std::vector<std::string>, std::less<>> entries_;
};

struct ProjectionOptions {
  /// Annotation properties in priority order; the first one that an entity
  /// carries provides its primary label.
  std::vector<std::string> annotation_props{std::string(vocab::kRdfsLabel),
                                            std::string(vocab::kOboExactSynonym)};
  bool inverse_subclass = true;
};

struct ProjectionReport {
  std::size_t subclass_edges = 0;        // R1
  std::size_t equivalence_edges = 0;     // R2, both directions counted
  std::size_t restriction_edges = 0;     // R3
  std::size_t assertion_edges = 0;       // R4
  std::size_t inverse_subclass_edges = 0;  // R5
  std::size_t skipped_axioms = 0;
  std::size_t annotations = 0;
  std::size_t entities_with_labels = 0;
  std::size_t entities_without_labels = 0;

  std::size_t total_edges() const noexcept {
    return subclass_edges + equivalence_edges + restriction_edges + assertion_edges +
           inverse_subclass_edges;
  }
  std::string to_text() const;
};

struct ProjectionResult {
  std::vector<ProjectedEdge> edges;  // deduplicated, first-emission order
  LexicalTable lexical;
  ProjectionReport report;
};

ProjectionResult project(const std::vector<Triple>& triples,
                         const ProjectionOptions& options = {});

// Edge-list TSV: source \t label \t target \t weight, one edge per line.
std::string format_edges_tsv(const std::vector<ProjectedEdge>& edges);
std::vector<ProjectedEdge> parse_edges_tsv(std::string_view text);

// Lexical TSV: iri \t label, one row per label in table order.
std::string format_lexical_tsv(const LexicalTable& table);
LexicalTable parse_lexical_tsv(std::string_view text);

}  // namespace owl2vec4oa
