#include "owl2vec4oa/projection.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "owl2vec4oa/text_io.hpp"

namespace owl2vec4oa {

bool vocab::is_reserved(std::string_view iri) noexcept {
  return iri.starts_with(kRdf) || iri.starts_with(kRdfs) || iri.starts_with(kOwl);
}

void LexicalTable::add(const std::string& iri, std::string label) {
  auto& labels = entries_[iri];
  if (std::find(labels.begin(), labels.end(), label) == labels.end()) {
    labels.push_back(std::move(label));
  }
}

const std::vector<std::string>* LexicalTable::labels(std::string_view iri) const {
  auto it = entries_.find(iri);
  return it == entries_.end() ? nullptr : &it->second;
}

const std::string* LexicalTable::primary(std::string_view iri) const {
  const auto* l = labels(iri);
  return l ? &l->front() : nullptr;
}

void LexicalTable::merge(const LexicalTable& other) {
  for (const auto& [iri, labels] : other) {
    for (const auto& label : labels) add(iri, label);
  }
}

std::string ProjectionReport::to_text() const {
  std::ostringstream out;
  out << "edges.subclass = " << subclass_edges << '\n'
      << "edges.equivalence = " << equivalence_edges << '\n'
      << "edges.restriction = " << restriction_edges << '\n'
      << "edges.assertion = " << assertion_edges << '\n'
      << "edges.inverse_subclass = " << inverse_subclass_edges << '\n'
      << "edges.total = " << total_edges() << '\n'
      << "skipped_axioms = " << skipped_axioms << '\n'
      << "annotations = " << annotations << '\n'
      << "entities.with_labels = " << entities_with_labels << '\n'
      << "entities.without_labels = " << entities_without_labels << '\n';
  return out.str();
}

namespace {

struct BlankBody {
  bool is_restriction = false;
  std::vector<const Object*> on_property;
  std::vector<const Object*> some_values_from;
};

class EdgeSink {
 public:
  bool emit(const Iri& s, std::string_view label, const Iri& t) {
    std::string key = s.str();
    key += '\x1f';
    key += label;
    key += '\x1f';
    key += t.str();
    if (!seen_.insert(std::move(key)).second) return false;
    edges_.push_back(ProjectedEdge{s, Iri(std::string(label)), t, 1.0});
    return true;
  }
  std::vector<ProjectedEdge> take() { return std::move(edges_); }

 private:
  std::unordered_set<std::string> seen_;
  std::vector<ProjectedEdge> edges_;
};

}  // namespace

ProjectionResult project(const std::vector<Triple>& triples, const ProjectionOptions& options) {
  ProjectionResult result;
  ProjectionReport& report = result.report;

  std::unordered_map<std::string, std::size_t> annotation_rank;
  for (std::size_t i = 0; i < options.annotation_props.size(); ++i) {
    annotation_rank.emplace(options.annotation_props[i], i);
  }

  // Index blank-node bodies and annotation-property declarations first.
  std::unordered_map<std::string, BlankBody> bodies;
  std::unordered_set<std::string> declared_annotation_props;
  for (const auto& t : triples) {
    if (const auto* bn = std::get_if<BlankNode>(&t.subject)) {
      BlankBody& body = bodies[bn->label];
      const std::string& p = t.predicate.str();
      if (p == vocab::kRdfType) {
        if (const auto* o = std::get_if<Iri>(&t.object); o && o->str() == vocab::kOwlRestriction) {
          body.is_restriction = true;
        }
      } else if (p == vocab::kOwlOnProperty) {
        body.on_property.push_back(&t.object);
      } else if (p == vocab::kOwlSomeValuesFrom) {
        body.some_values_from.push_back(&t.object);
      }
    } else if (t.predicate.str() == vocab::kRdfType) {
      const auto* o = std::get_if<Iri>(&t.object);
      if (o && o->str() == vocab::kOwlAnnotationProperty) {
        declared_annotation_props.insert(std::get<Iri>(t.subject).str());
      }
    }
  }

  // Decodes a one-level existential restriction; nullopt if the body is anything else.
  auto decode_restriction = [&](const BlankNode& bn) -> std::optional<std::pair<Iri, Iri>> {
    auto it = bodies.find(bn.label);
    if (it == bodies.end()) return std::nullopt;
    const BlankBody& body = it->second;
    if (!body.is_restriction || body.on_property.size() != 1 ||
        body.some_values_from.size() != 1) {
      return std::nullopt;
    }
    const auto* prop = std::get_if<Iri>(body.on_property.front());
    const auto* filler = std::get_if<Iri>(body.some_values_from.front());
    if (!prop || !filler) return std::nullopt;
    return std::make_pair(*prop, *filler);
  };

  EdgeSink sink;
  std::unordered_map<std::string, std::vector<std::vector<std::string>>> pending_labels;
  std::vector<std::string> label_order;

  for (const auto& t : triples) {
    const std::string& p = t.predicate.str();
    const auto* subject = std::get_if<Iri>(&t.subject);

    if (auto rank = annotation_rank.find(p); rank != annotation_rank.end()) {
      if (const auto* lit = std::get_if<Literal>(&t.object); lit && subject) {
        auto [slot, inserted] = pending_labels.try_emplace(subject->str());
        if (inserted) label_order.push_back(subject->str());
        slot->second.resize(options.annotation_props.size());
        slot->second[rank->second].push_back(lit->lexical);
        ++report.annotations;
        continue;
      }
    }

    const bool is_subclass = p == vocab::kRdfsSubClassOf;
    const bool is_equivalent = p == vocab::kOwlEquivalentClass;
    if (is_subclass || is_equivalent) {
      if (!subject) {
        ++report.skipped_axioms;
        continue;
      }
      if (const auto* target = std::get_if<Iri>(&t.object)) {
        if (is_subclass) {
          if (sink.emit(*subject, vocab::kRdfsSubClassOf, *target)) ++report.subclass_edges;
          if (options.inverse_subclass &&
              sink.emit(*target, vocab::kInverseSubClassOf, *subject)) {
            ++report.inverse_subclass_edges;
          }
        } else {
          if (sink.emit(*subject, vocab::kOwlEquivalentClass, *target)) ++report.equivalence_edges;
          if (sink.emit(*target, vocab::kOwlEquivalentClass, *subject)) ++report.equivalence_edges;
        }
      } else if (const auto* bn = std::get_if<BlankNode>(&t.object)) {
        if (auto decoded = decode_restriction(*bn)) {
          if (sink.emit(*subject, decoded->first.str(), decoded->second)) {
            ++report.restriction_edges;
          }
        } else {
          ++report.skipped_axioms;
        }
      } else {
        ++report.skipped_axioms;
      }
      continue;
    }

    if (vocab::is_reserved(p) || annotation_rank.contains(p) ||
        declared_annotation_props.contains(p)) {
      continue;
    }
    if (std::holds_alternative<Literal>(t.object)) continue;
    const auto* object = std::get_if<Iri>(&t.object);
    if (subject && object) {
      if (sink.emit(*subject, p, *object)) ++report.assertion_edges;
    } else if (subject) {
      ++report.skipped_axioms;
    }
  }

  for (const auto& iri : label_order) {
    for (auto& per_rank : pending_labels[iri]) {
      for (auto& label : per_rank) result.lexical.add(iri, std::move(label));
    }
  }

  result.edges = sink.take();

  std::set<std::string, std::less<>> entities;
  for (const auto& e : result.edges) {
    entities.insert(e.source.str());
    entities.insert(e.target.str());
  }
  for (const auto& [iri, labels] : result.lexical) entities.insert(iri);
  for (const auto& iri : entities) {
    if (result.lexical.labels(iri)) {
      ++report.entities_with_labels;
    } else {
      ++report.entities_without_labels;
    }
  }
  return result;
}

std::string format_edges_tsv(const std::vector<ProjectedEdge>& edges) {
  std::string out;
  for (const auto& e : edges) {
    out += e.source.str();
    out += '\t';
    out += e.label.str();
    out += '\t';
    out += e.target.str();
    out += '\t';
    out += format_real(e.weight);
    out += '\n';
  }
  return out;
}

std::vector<ProjectedEdge> parse_edges_tsv(std::string_view text) {
  std::vector<ProjectedEdge> edges;
  std::size_t row = 0;
  for (std::string_view line : split_lines(text)) {
    ++row;
    if (line.empty() || line.front() == '#') continue;
    auto f = split_fields(line);
    double w = 0;
    if (f.size() != 4 || !parse_real(f[3], w)) {
      throw std::runtime_error("edge list row " + std::to_string(row) +
                               ": expected source, label, target, weight");
    }
    edges.push_back(ProjectedEdge{Iri(std::string(f[0])), Iri(std::string(f[1])),
                                  Iri(std::string(f[2])), w});
  }
  return edges;
}

std::string format_lexical_tsv(const LexicalTable& table) {
  std::string out;
  for (const auto& [iri, labels] : table) {
    for (const auto& label : labels) {
      out += iri;
      out += '\t';
      out += escape_tsv_field(label);
      out += '\n';
    }
  }
  return out;
}

LexicalTable parse_lexical_tsv(std::string_view text) {
  LexicalTable table;
  std::size_t row = 0;
  for (std::string_view line : split_lines(text)) {
    ++row;
    if (line.empty()) continue;
    auto f = split_fields(line);
    if (f.size() != 2 || !is_valid_iri(f[0])) {
      throw std::runtime_error("lexical table row " + std::to_string(row) +
                               ": expected iri and label");
    }
    table.add(std::string(f[0]), unescape_tsv_field(f[1]));
  }
  return table;
}

}  // namespace owl2vec4oa
