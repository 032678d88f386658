#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "owl2vec4oa/projection.hpp"

namespace owl2vec4oa {

using Sentence = std::vector<std::string>;
using Document = std::vector<Sentence>;

struct TokenizerConfig {
  bool lowercase = true;
  bool split_camel_case = true;  // lower->upper and letter<->digit boundaries
};

/// Splits on non-alphanumeric characters and case/digit boundaries. Bytes
/// >= 0x80 (UTF-8 sequences) count as letters and are never case-folded.
std::vector<std::string> tokenize_label(std::string_view label, const TokenizerConfig& cfg = {});

/// Text after the last '#' or '/'; for IRIs with neither, after the last ':'.
std::string_view local_name(std::string_view iri) noexcept;

struct Lexicalization {
  std::vector<std::string> tokens;
  bool full_iri_fallback = false;
};

/// Tokens of the entity's primary label, else of its local name, else the
/// full IRI as a single token.
Lexicalization lexicalize(std::string_view iri, const LexicalTable& lex,
                          const TokenizerConfig& cfg = {});

struct CorpusConfig {
  double replace_prob = 0.5;       // per-occurrence replacement in the combined document
  std::uint64_t rng_seed = 42;
  bool sample_all_labels = false;  // draw uniformly among an entity's labels
  TokenizerConfig tokenizer;
};

struct Documents {
  Document structure;
  Document lexical;
  Document combined;
  /// IRI occurrences in the lexical document that fell back to the full IRI.
  std::size_t full_iri_fallbacks = 0;

  /// structure ++ lexical ++ combined.
  Document merged() const;
};

/// Throws std::invalid_argument unless replace_prob is in [0, 1].
Documents build_documents(std::span<const Sentence> walks, const LexicalTable& lex,
                          const CorpusConfig& cfg = {});

}  // namespace owl2vec4oa
