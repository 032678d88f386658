#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "owl2vec4oa/corpus.hpp"
#include "owl2vec4oa/projection.hpp"
#include "owl2vec4oa/sgns.hpp"

namespace owl2vec4oa {

/// Score assigned when either entity has no usable vector. Below every cosine.
inline constexpr double kAbsentScore = -2.0;

inline constexpr std::array<std::size_t, 5> kHitsAt{1, 5, 10, 20, 30};

struct CandidatePool {
  std::string source;
  std::string true_target;
  std::vector<std::string> candidates;  // deduplicated, contains true_target
};

class EmptyPool : public std::runtime_error {
 public:
  explicit EmptyPool(std::size_t index)
      : std::runtime_error("candidate pool " + std::to_string(index) + " is empty") {}
};

class PoolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RankingReport {
  double mrr = 0.0;
  std::array<double, kHitsAt.size()> hits{};  // aligned with kHitsAt
  std::vector<std::size_t> ranks;             // 1-based, one per pool

  double hits_at(std::size_t k) const;
  /// Two-line TSV: header "MRR Hits@1 ... Hits@30", then values.
  std::string to_tsv() const;
  /// Fixed-width table with the same columns.
  std::string to_table() const;
};

/// The IRI's own vector, else the mean of its primary-label word vectors that
/// are in the table, else nullopt.
std::optional<std::vector<double>> entity_vector(std::string_view iri, const EmbeddingTable& emb,
                                                 const LexicalTable& lex,
                                                 const TokenizerConfig& tokenizer = {});

/// Cosine similarity, or kAbsentScore if a vector is absent or has zero norm.
double cosine_score(std::span<const double> a, std::span<const double> b);
double score(std::string_view source, std::string_view target, const EmbeddingTable& emb,
             const LexicalTable& lex);

/// 1-based position of `true_index` after sorting by descending score, ties
/// by ascending candidate IRI.
std::size_t rank_of(std::span<const double> scores, std::span<const std::string> candidates,
                    std::size_t true_index);

/// Candidates of one pool ordered best first, with their scores.
std::vector<std::pair<std::string, double>> rank_candidates(const CandidatePool& pool,
                                                            const EmbeddingTable& emb,
                                                            const LexicalTable& lex);

RankingReport report_from_ranks(std::vector<std::size_t> ranks);

/// Throws EmptyPool if any pool has no candidates.
RankingReport evaluate(std::span<const CandidatePool> pools, const EmbeddingTable& emb,
                       const LexicalTable& lex);

/// Rows "SrcEntity \t TgtEntity \t TgtCandidates" (comma-separated list);
/// optional header row starting with "SrcEntity".
std::vector<CandidatePool> parse_pools(std::string_view text);
std::string format_pools(std::span<const CandidatePool> pools);

}  // namespace owl2vec4oa
