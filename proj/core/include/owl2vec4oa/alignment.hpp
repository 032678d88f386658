#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "owl2vec4oa/ntriples.hpp"

namespace owl2vec4oa {

enum class Relation { Equivalence, Subsumption };

/// "=" or "<" as used in the mapping TSV.
std::string_view relation_symbol(Relation r) noexcept;

/// One correspondence <source, target, relation, confidence>, confidence in (0, 1].
struct Mapping {
  Iri source;
  Iri target;
  Relation relation = Relation::Equivalence;
  double confidence = 1.0;
  friend bool operator==(const Mapping&, const Mapping&) = default;
};

/// How two confidences for the same (source, target, relation) key combine.
enum class ConfidenceRule { Max, Min, Mean };

double combine_confidence(ConfidenceRule rule, double a, double b) noexcept;

/// Insertion-ordered mappings, unique on (source, target, relation).
class MappingSet {
 public:
  MappingSet() = default;

  /// Adds `m`, or merges its confidence into an existing entry with `rule`.
  void insert(const Mapping& m, ConfidenceRule on_collision = ConfidenceRule::Max);

  const Mapping* find(const Iri& source, const Iri& target, Relation relation) const;

  std::size_t size() const noexcept { return mappings_.size(); }
  bool empty() const noexcept { return mappings_.empty(); }
  const std::vector<Mapping>& mappings() const noexcept { return mappings_; }
  auto begin() const { return mappings_.begin(); }
  auto end() const { return mappings_.end(); }

 private:
  static std::string key(const Iri& s, const Iri& t, Relation r);

  std::vector<Mapping> mappings_;
  std::unordered_map<std::string, std::size_t> index_;
};

class MappingError : public std::runtime_error {
 public:
  enum class Kind { BadConfidence, BadIri, BadRelation, BadRow };
  MappingError(Kind kind, std::size_t row, const std::string& detail);
  Kind kind() const noexcept { return kind_; }
  std::size_t row() const noexcept { return row_; }

 private:
  Kind kind_;
  std::size_t row_;
};

/// TSV rows: source, target[, score[, relation]]. A first row whose first
/// field is "SrcEntity" is a header. Missing score means 1.0.
MappingSet parse_mappings(std::string_view text, Relation default_relation = Relation::Equivalence);
MappingSet load_mappings(const std::filesystem::path& path,
                         Relation default_relation = Relation::Equivalence);
std::string format_mappings(const MappingSet& set);

/// Key-wise union; `a` order first, then new keys from `b`.
MappingSet set_union(const MappingSet& a, const MappingSet& b,
                     ConfidenceRule rule = ConfidenceRule::Max);

/// Keys present in both, in `a` order.
MappingSet set_intersection(const MappingSet& a, const MappingSet& b,
                            ConfidenceRule rule = ConfidenceRule::Mean);

/// Every source and target IRI, first-occurrence order.
std::vector<Iri> seed_entities(const MappingSet& set);

}  // namespace owl2vec4oa
