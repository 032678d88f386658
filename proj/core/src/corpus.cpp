#include "owl2vec4oa/corpus.hpp"

#include <stdexcept>
#include <unordered_map>

#include "owl2vec4oa/random.hpp"

namespace owl2vec4oa {

namespace {

constexpr std::uint64_t kCorpusSalt = 0x636F72707573;  // "corpus"
constexpr std::uint64_t kLabelStream = 0;
constexpr std::uint64_t kReplaceStream = 1;

enum class CharClass { Separator, Lower, Upper, Digit };

CharClass classify(unsigned char c) {
  if (c >= 'a' && c <= 'z') return CharClass::Lower;
  if (c >= 'A' && c <= 'Z') return CharClass::Upper;
  if (c >= '0' && c <= '9') return CharClass::Digit;
  if (c >= 0x80) return CharClass::Lower;
  return CharClass::Separator;
}

bool is_boundary(CharClass prev, CharClass cur) {
  const bool prev_letter = prev == CharClass::Lower || prev == CharClass::Upper;
  const bool cur_letter = cur == CharClass::Lower || cur == CharClass::Upper;
  if (prev == CharClass::Lower && cur == CharClass::Upper) return true;
  if (prev_letter && cur == CharClass::Digit) return true;
  if (prev == CharClass::Digit && cur_letter) return true;
  return false;
}

}  // namespace

std::vector<std::string> tokenize_label(std::string_view label, const TokenizerConfig& cfg) {
  std::vector<std::string> tokens;
  std::string current;
  CharClass prev = CharClass::Separator;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (char ch : label) {
    const auto c = static_cast<unsigned char>(ch);
    const CharClass cls = classify(c);
    if (cls == CharClass::Separator) {
      flush();
    } else {
      if (cfg.split_camel_case && prev != CharClass::Separator && is_boundary(prev, cls)) flush();
      current += (cfg.lowercase && cls == CharClass::Upper) ? static_cast<char>(c | 0x20) : ch;
    }
    prev = cls;
  }
  flush();
  return tokens;
}

std::string_view local_name(std::string_view iri) noexcept {
  std::size_t pos = iri.find_last_of("#/");
  if (pos == std::string_view::npos) pos = iri.find_last_of(':');
  return pos == std::string_view::npos ? iri : iri.substr(pos + 1);
}

namespace {

Lexicalization lexicalize_with(std::string_view iri, const std::string* label,
                               const TokenizerConfig& cfg) {
  Lexicalization out;
  if (label) out.tokens = tokenize_label(*label, cfg);
  if (out.tokens.empty()) out.tokens = tokenize_label(local_name(iri), cfg);
  if (out.tokens.empty()) {
    out.tokens.emplace_back(iri);
    out.full_iri_fallback = true;
  }
  return out;
}

}  // namespace

Lexicalization lexicalize(std::string_view iri, const LexicalTable& lex,
                          const TokenizerConfig& cfg) {
  return lexicalize_with(iri, lex.primary(iri), cfg);
}

Document Documents::merged() const {
  Document out;
  out.reserve(structure.size() + lexical.size() + combined.size());
  out.insert(out.end(), structure.begin(), structure.end());
  out.insert(out.end(), lexical.begin(), lexical.end());
  out.insert(out.end(), combined.begin(), combined.end());
  return out;
}

Documents build_documents(std::span<const Sentence> walks, const LexicalTable& lex,
                          const CorpusConfig& cfg) {
  if (!(cfg.replace_prob >= 0.0 && cfg.replace_prob <= 1.0)) {
    throw std::invalid_argument("replace_prob must be in [0, 1]");
  }

  std::unordered_map<std::string, Lexicalization> cache;
  auto primary_lexicalization = [&](const std::string& iri) -> const Lexicalization& {
    auto it = cache.find(iri);
    if (it == cache.end()) it = cache.emplace(iri, lexicalize(iri, lex, cfg.tokenizer)).first;
    return it->second;
  };

  Documents docs;
  docs.structure.assign(walks.begin(), walks.end());
  docs.lexical.reserve(walks.size());
  docs.combined.reserve(walks.size());

  for (std::size_t i = 0; i < walks.size(); ++i) {
    const Sentence& walk = walks[i];
    // One label draw per position keeps the lexical and combined documents
    // consistent when labels are sampled.
    std::vector<Lexicalization> sampled;
    if (cfg.sample_all_labels) {
      SplitMix64 label_rng(derive_seed(cfg.rng_seed, {kCorpusSalt, kLabelStream, i}));
      for (const auto& iri : walk) {
        const auto* labels = lex.labels(iri);
        const std::uint64_t pick = label_rng.below(labels ? labels->size() : 1);
        sampled.push_back(
            lexicalize_with(iri, labels ? &(*labels)[pick] : nullptr, cfg.tokenizer));
      }
    }
    auto lexical_for = [&](std::size_t pos) -> const Lexicalization& {
      return cfg.sample_all_labels ? sampled[pos] : primary_lexicalization(walk[pos]);
    };

    Sentence lexical;
    for (std::size_t pos = 0; pos < walk.size(); ++pos) {
      const Lexicalization& l = lexical_for(pos);
      if (l.full_iri_fallback) ++docs.full_iri_fallbacks;
      lexical.insert(lexical.end(), l.tokens.begin(), l.tokens.end());
    }
    docs.lexical.push_back(std::move(lexical));

    SplitMix64 replace_rng(derive_seed(cfg.rng_seed, {kCorpusSalt, kReplaceStream, i}));
    Sentence combined;
    for (std::size_t pos = 0; pos < walk.size(); ++pos) {
      if (replace_rng.uniform() < cfg.replace_prob) {
        const Lexicalization& l = lexical_for(pos);
        combined.insert(combined.end(), l.tokens.begin(), l.tokens.end());
      } else {
        combined.push_back(walk[pos]);
      }
    }
    docs.combined.push_back(std::move(combined));
  }
  return docs;
}

}  // namespace owl2vec4oa
