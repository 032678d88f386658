#include "owl2vec4oa/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>
#include <unordered_set>

#include "owl2vec4oa/text_io.hpp"

namespace owl2vec4oa {

double RankingReport::hits_at(std::size_t k) const {
  for (std::size_t i = 0; i < kHitsAt.size(); ++i) {
    if (kHitsAt[i] == k) return hits[i];
  }
  throw std::out_of_range("no Hits@" + std::to_string(k) + " column");
}

std::string RankingReport::to_tsv() const {
  std::string out = "MRR";
  for (std::size_t k : kHitsAt) out += "\tHits@" + std::to_string(k);
  out += "\n" + format_real(mrr);
  for (double h : hits) out += "\t" + format_real(h);
  out += '\n';
  return out;
}

std::string RankingReport::to_table() const {
  std::string out;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-8s", "MRR");
  out += buf;
  for (std::size_t k : kHitsAt) {
    std::snprintf(buf, sizeof buf, "%-9s", ("Hits@" + std::to_string(k)).c_str());
    out += buf;
  }
  out += '\n';
  std::snprintf(buf, sizeof buf, "%-8.3f", mrr);
  out += buf;
  for (double h : hits) {
    std::snprintf(buf, sizeof buf, "%-9.3f", h);
    out += buf;
  }
  out += '\n';
  return out;
}

std::optional<std::vector<double>> entity_vector(std::string_view iri, const EmbeddingTable& emb,
                                                 const LexicalTable& lex,
                                                 const TokenizerConfig& tokenizer) {
  if (auto row = emb.find(iri)) return std::vector<double>(row->begin(), row->end());
  const std::string* label = lex.primary(iri);
  if (!label) return std::nullopt;
  std::vector<double> mean(emb.dim(), 0.0);
  std::size_t found = 0;
  for (const auto& word : tokenize_label(*label, tokenizer)) {
    if (auto row = emb.find(word)) {
      for (std::size_t i = 0; i < emb.dim(); ++i) mean[i] += (*row)[i];
      ++found;
    }
  }
  if (found == 0) return std::nullopt;
  for (double& x : mean) x /= static_cast<double>(found);
  return mean;
}

double cosine_score(std::span<const double> a, std::span<const double> b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return kAbsentScore;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double score(std::string_view source, std::string_view target, const EmbeddingTable& emb,
             const LexicalTable& lex) {
  auto a = entity_vector(source, emb, lex);
  auto b = entity_vector(target, emb, lex);
  if (!a || !b) return kAbsentScore;
  return cosine_score(*a, *b);
}

std::size_t rank_of(std::span<const double> scores, std::span<const std::string> candidates,
                    std::size_t true_index) {
  const double ts = scores[true_index];
  const std::string& tc = candidates[true_index];
  std::size_t ahead = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (i == true_index) continue;
    if (scores[i] > ts || (scores[i] == ts && candidates[i] < tc)) ++ahead;
  }
  return ahead + 1;
}

namespace {

std::vector<double> pool_scores(const CandidatePool& pool, const EmbeddingTable& emb,
                                const LexicalTable& lex) {
  auto src = entity_vector(pool.source, emb, lex);
  std::vector<double> scores;
  scores.reserve(pool.candidates.size());
  for (const auto& c : pool.candidates) {
    auto v = src ? entity_vector(c, emb, lex) : std::nullopt;
    scores.push_back(src && v ? cosine_score(*src, *v) : kAbsentScore);
  }
  return scores;
}

}  // namespace

std::vector<std::pair<std::string, double>> rank_candidates(const CandidatePool& pool,
                                                            const EmbeddingTable& emb,
                                                            const LexicalTable& lex) {
  auto scores = pool_scores(pool, emb, lex);
  std::vector<std::pair<std::string, double>> ranked;
  for (std::size_t i = 0; i < scores.size(); ++i) ranked.emplace_back(pool.candidates[i], scores[i]);
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  return ranked;
}

RankingReport report_from_ranks(std::vector<std::size_t> ranks) {
  RankingReport report;
  report.ranks = std::move(ranks);
  if (report.ranks.empty()) return report;
  const auto n = static_cast<double>(report.ranks.size());
  double rr = 0.0;
  std::array<std::size_t, kHitsAt.size()> within{};
  for (std::size_t r : report.ranks) {
    rr += 1.0 / static_cast<double>(r);
    for (std::size_t i = 0; i < kHitsAt.size(); ++i) {
      if (r <= kHitsAt[i]) ++within[i];
    }
  }
  report.mrr = rr / n;
  for (std::size_t i = 0; i < kHitsAt.size(); ++i) {
    report.hits[i] = static_cast<double>(within[i]) / n;
  }
  return report;
}

RankingReport evaluate(std::span<const CandidatePool> pools, const EmbeddingTable& emb,
                       const LexicalTable& lex) {
  std::vector<std::size_t> ranks;
  ranks.reserve(pools.size());
  for (std::size_t p = 0; p < pools.size(); ++p) {
    const auto& pool = pools[p];
    if (pool.candidates.empty()) throw EmptyPool(p);
    auto it = std::find(pool.candidates.begin(), pool.candidates.end(), pool.true_target);
    if (it == pool.candidates.end()) {
      throw PoolError("pool " + std::to_string(p) + ": true target not among candidates");
    }
    auto scores = pool_scores(pool, emb, lex);
    ranks.push_back(rank_of(scores, pool.candidates,
                            static_cast<std::size_t>(it - pool.candidates.begin())));
  }
  return report_from_ranks(std::move(ranks));
}

std::vector<CandidatePool> parse_pools(std::string_view text) {
  std::vector<CandidatePool> pools;
  std::size_t row = 0;
  for (std::string_view line : split_lines(text)) {
    ++row;
    if (line.empty()) continue;
    auto f = split_fields(line);
    if (f[0] == "SrcEntity") continue;
    if (f.size() != 3) throw PoolError("pool row " + std::to_string(row) + ": expected 3 columns");
    CandidatePool pool{std::string(f[0]), std::string(f[1]), {}};
    if (!is_valid_iri(pool.source) || !is_valid_iri(pool.true_target)) {
      throw PoolError("pool row " + std::to_string(row) + ": malformed IRI");
    }
    std::unordered_set<std::string_view> seen;
    for (std::string_view c : split_fields(f[2], ',')) {
      if (c.empty()) continue;
      if (!is_valid_iri(c)) {
        throw PoolError("pool row " + std::to_string(row) + ": malformed candidate IRI");
      }
      if (seen.insert(c).second) pool.candidates.emplace_back(c);
    }
    if (!pool.candidates.empty() && !seen.contains(pool.true_target)) {
      throw PoolError("pool row " + std::to_string(row) + ": true target not among candidates");
    }
    pools.push_back(std::move(pool));
  }
  return pools;
}

std::string format_pools(std::span<const CandidatePool> pools) {
  std::string out = "SrcEntity\tTgtEntity\tTgtCandidates\n";
  for (const auto& p : pools) {
    out += p.source + '\t' + p.true_target + '\t';
    for (std::size_t i = 0; i < p.candidates.size(); ++i) {
      if (i) out += ',';
      out += p.candidates[i];
    }
    out += '\n';
  }
  return out;
}

}  // namespace owl2vec4oa
