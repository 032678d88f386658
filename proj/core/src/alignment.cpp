#include "owl2vec4oa/alignment.hpp"

#include <unordered_set>

#include "owl2vec4oa/text_io.hpp"

namespace owl2vec4oa {

std::string_view relation_symbol(Relation r) noexcept {
  return r == Relation::Equivalence ? "=" : "<";
}

double combine_confidence(ConfidenceRule rule, double a, double b) noexcept {
  switch (rule) {
    case ConfidenceRule::Max: return a > b ? a : b;
    case ConfidenceRule::Min: return a < b ? a : b;
    case ConfidenceRule::Mean: return (a + b) / 2.0;
  }
  return a;
}

std::string MappingSet::key(const Iri& s, const Iri& t, Relation r) {
  std::string k = s.str();
  k += '\x1f';
  k += t.str();
  k += '\x1f';
  k += relation_symbol(r);
  return k;
}

void MappingSet::insert(const Mapping& m, ConfidenceRule on_collision) {
  auto [it, inserted] = index_.try_emplace(key(m.source, m.target, m.relation), mappings_.size());
  if (inserted) {
    mappings_.push_back(m);
  } else {
    Mapping& existing = mappings_[it->second];
    existing.confidence = combine_confidence(on_collision, existing.confidence, m.confidence);
  }
}

const Mapping* MappingSet::find(const Iri& source, const Iri& target, Relation relation) const {
  auto it = index_.find(key(source, target, relation));
  return it == index_.end() ? nullptr : &mappings_[it->second];
}

namespace {

const char* kind_name(MappingError::Kind kind) {
  switch (kind) {
    case MappingError::Kind::BadConfidence: return "BadConfidence";
    case MappingError::Kind::BadIri: return "BadIri";
    case MappingError::Kind::BadRelation: return "BadRelation";
    case MappingError::Kind::BadRow: return "BadRow";
  }
  return "MappingError";
}

std::string_view strip_brackets(std::string_view v) {
  if (v.size() >= 2 && v.front() == '<' && v.back() == '>') return v.substr(1, v.size() - 2);
  return v;
}

}  // namespace

MappingError::MappingError(Kind kind, std::size_t row, const std::string& detail)
    : std::runtime_error(std::string(kind_name(kind)) + " (row " + std::to_string(row) +
                         "): " + detail),
      kind_(kind),
      row_(row) {}

MappingSet parse_mappings(std::string_view text, Relation default_relation) {
  MappingSet set;
  std::size_t row = 0;
  bool first = true;
  for (std::string_view line : split_lines(text)) {
    ++row;
    if (line.empty()) continue;
    auto f = split_fields(line);
    if (first) {
      first = false;
      if (f[0] == "SrcEntity") continue;
    }
    if (f.size() < 2 || f.size() > 4) {
      throw MappingError(MappingError::Kind::BadRow, row, "expected 2 to 4 columns");
    }
    auto src = Iri::try_make(strip_brackets(f[0]));
    auto tgt = Iri::try_make(strip_brackets(f[1]));
    if (!src) throw MappingError(MappingError::Kind::BadIri, row, std::string(f[0]));
    if (!tgt) throw MappingError(MappingError::Kind::BadIri, row, std::string(f[1]));
    if (*src == *tgt) {
      throw MappingError(MappingError::Kind::BadIri, row, "source equals target");
    }

    double confidence = 1.0;
    if (f.size() >= 3 && !f[2].empty()) {
      if (!parse_real(f[2], confidence)) {
        throw MappingError(MappingError::Kind::BadConfidence, row, std::string(f[2]));
      }
      if (confidence > 1.0 && confidence <= 1.0 + 1e-9) confidence = 1.0;
      if (!(confidence > 0.0 && confidence <= 1.0)) {
        throw MappingError(MappingError::Kind::BadConfidence, row, std::string(f[2]));
      }
    }

    Relation relation = default_relation;
    if (f.size() == 4 && !f[3].empty()) {
      if (f[3] == "=") {
        relation = Relation::Equivalence;
      } else if (f[3] == "<") {
        relation = Relation::Subsumption;
      } else {
        throw MappingError(MappingError::Kind::BadRelation, row, std::string(f[3]));
      }
    }
    set.insert(Mapping{std::move(*src), std::move(*tgt), relation, confidence});
  }
  return set;
}

MappingSet load_mappings(const std::filesystem::path& path, Relation default_relation) {
  return parse_mappings(read_file(path), default_relation);
}

std::string format_mappings(const MappingSet& set) {
  std::string out = "SrcEntity\tTgtEntity\tScore\tRelation\n";
  for (const auto& m : set) {
    out += m.source.str();
    out += '\t';
    out += m.target.str();
    out += '\t';
    out += format_real(m.confidence);
    out += '\t';
    out += relation_symbol(m.relation);
    out += '\n';
  }
  return out;
}

MappingSet set_union(const MappingSet& a, const MappingSet& b, ConfidenceRule rule) {
  MappingSet out = a;
  for (const auto& m : b) out.insert(m, rule);
  return out;
}

MappingSet set_intersection(const MappingSet& a, const MappingSet& b, ConfidenceRule rule) {
  MappingSet out;
  for (const auto& m : a) {
    if (const Mapping* other = b.find(m.source, m.target, m.relation)) {
      Mapping merged = m;
      merged.confidence = combine_confidence(rule, m.confidence, other->confidence);
      out.insert(merged);
    }
  }
  return out;
}

std::vector<Iri> seed_entities(const MappingSet& set) {
  std::vector<Iri> seeds;
  std::unordered_set<std::string> seen;
  for (const auto& m : set) {
    if (seen.insert(m.source.str()).second) seeds.push_back(m.source);
    if (seen.insert(m.target.str()).second) seeds.push_back(m.target);
  }
  return seeds;
}

}  // namespace owl2vec4oa
