#include "owl2vec4oa/sgns.hpp"

#include <algorithm>
#include <cstdio>
#include <thread>

#include "owl2vec4oa/random.hpp"
#include "owl2vec4oa/text_io.hpp"

namespace owl2vec4oa {

namespace {
constexpr std::uint64_t kTrainSalt = 0x73676E73;  // "sgns"
constexpr std::uint64_t kInitStream = 0xFFFFFFFF;
constexpr int kNegativeRedraws = 16;
}  // namespace

Vocabulary Vocabulary::build(std::span<const Sentence> corpus, std::uint64_t min_count) {
  std::unordered_map<std::string, std::uint64_t> counts;
  for (const auto& sentence : corpus) {
    for (const auto& token : sentence) ++counts[token];
  }
  Vocabulary v;
  for (auto& [token, count] : counts) {
    if (count >= min_count) v.entries_.push_back(Entry{token, count});
  }
  if (v.entries_.empty()) throw EmptyCorpus();
  std::sort(v.entries_.begin(), v.entries_.end(), [](const Entry& a, const Entry& b) {
    return a.count != b.count ? a.count > b.count : a.token < b.token;
  });
  for (std::size_t i = 0; i < v.entries_.size(); ++i) {
    v.index_.emplace(v.entries_[i].token, static_cast<TokenIndex>(i));
    v.total_ += v.entries_[i].count;
  }
  return v;
}

std::optional<TokenIndex> Vocabulary::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

NegativeSampler::NegativeSampler(const Vocabulary& vocab, double power) {
  cumulative_.reserve(vocab.size());
  double acc = 0.0;
  for (const auto& e : vocab.entries()) {
    acc += std::pow(static_cast<double>(e.count), power);
    cumulative_.push_back(acc);
  }
}

double NegativeSampler::probability(TokenIndex i) const {
  const double prev = i == 0 ? 0.0 : cumulative_.at(i - 1);
  return (cumulative_.at(i) - prev) / cumulative_.back();
}

TokenIndex NegativeSampler::sample(double u) const {
  const double r = u * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
  if (it == cumulative_.end()) --it;
  return static_cast<TokenIndex>(it - cumulative_.begin());
}

void TrainConfig::validate() const {
  if (dim < 1) throw std::invalid_argument("dim must be >= 1");
  if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  if (window < 1) throw std::invalid_argument("window must be >= 1");
  if (!(final_lr > 0.0 && final_lr <= initial_lr)) {
    throw std::invalid_argument("learning rates must satisfy 0 < final_lr <= initial_lr");
  }
  if (min_count < 1) throw std::invalid_argument("min_count must be >= 1");
  if (!(unigram_power >= 0.0)) throw std::invalid_argument("unigram_power must be >= 0");
  if (!(subsample >= 0.0)) throw std::invalid_argument("subsample must be >= 0");
}

EmbeddingTable::EmbeddingTable(std::vector<std::string> tokens, std::size_t dim,
                               std::vector<float> values)
    : tokens_(std::move(tokens)), dim_(dim), values_(std::move(values)) {
  if (values_.size() != tokens_.size() * dim_) {
    throw std::invalid_argument("embedding matrix size does not match vocabulary x dim");
  }
  for (std::size_t i = 0; i < tokens_.size(); ++i) index_.emplace(tokens_[i], i);
}

std::optional<std::span<const float>> EmbeddingTable::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return row(it->second);
}

namespace {

struct ShardTotals {
  double loss = 0.0;
  std::uint64_t pairs = 0;
};

struct TrainingState {
  const TrainConfig& cfg;
  const Vocabulary& vocab;
  const NegativeSampler& sampler;
  const std::vector<std::vector<TokenIndex>>& sentences;
  SgnsParameters<float>& params;
  std::vector<double> keep_prob;  // empty when subsampling is off
  std::uint64_t total_tokens;
  std::atomic<std::uint64_t> processed{0};
};

template <class Access>
ShardTotals run_shard(TrainingState& st, std::size_t begin, std::size_t end,
                      std::uint64_t stream_seed) {
  const TrainConfig& cfg = st.cfg;
  SplitMix64 rng(stream_seed);
  detail::StepScratch<float> scratch;
  std::vector<TokenIndex> negatives;
  std::vector<TokenIndex> kept;
  ShardTotals totals;

  for (std::size_t s = begin; s < end; ++s) {
    const auto& sentence = st.sentences[s];
    const std::uint64_t base = st.processed.fetch_add(sentence.size(), std::memory_order_relaxed);

    const std::vector<TokenIndex>* tokens = &sentence;
    if (!st.keep_prob.empty()) {
      kept.clear();
      for (TokenIndex t : sentence) {
        if (rng.uniform() < st.keep_prob[t]) kept.push_back(t);
      }
      tokens = &kept;
    }

    for (std::size_t pos = 0; pos < tokens->size(); ++pos) {
      const double progress =
          static_cast<double>(base + pos) / static_cast<double>(st.total_tokens);
      const auto lr = static_cast<float>(
          std::max(cfg.final_lr, cfg.initial_lr + (cfg.final_lr - cfg.initial_lr) * progress));
      const std::size_t reach = 1 + static_cast<std::size_t>(rng.below(cfg.window));
      const std::size_t lo = pos >= reach ? pos - reach : 0;
      const std::size_t hi = std::min(tokens->size() - 1, pos + reach);
      const TokenIndex center = (*tokens)[pos];

      for (std::size_t j = lo; j <= hi; ++j) {
        if (j == pos) continue;
        const TokenIndex context = (*tokens)[j];
        negatives.clear();
        for (std::size_t k = 0; k < cfg.negatives; ++k) {
          for (int attempt = 0; attempt < kNegativeRedraws; ++attempt) {
            const TokenIndex n = st.sampler.sample(rng.uniform());
            if (n != context) {
              negatives.push_back(n);
              break;
            }
          }
        }
        totals.loss += detail::sgns_kernel<Access>(st.params.input.data(),
                                                   st.params.output.data(), st.params.dim,
                                                   center, context, negatives, lr, scratch);
        ++totals.pairs;
      }
    }
  }
  return totals;
}

}  // namespace

TrainResult train(std::span<const Sentence> corpus, const TrainConfig& cfg) {
  cfg.validate();
  const Vocabulary vocab = Vocabulary::build(corpus, cfg.min_count);
  const NegativeSampler sampler(vocab, cfg.unigram_power);

  std::vector<std::vector<TokenIndex>> sentences;
  sentences.reserve(corpus.size());
  std::uint64_t corpus_tokens = 0;
  for (const auto& sentence : corpus) {
    std::vector<TokenIndex> ids;
    ids.reserve(sentence.size());
    for (const auto& token : sentence) {
      if (auto id = vocab.find(token)) ids.push_back(*id);
    }
    corpus_tokens += ids.size();
    sentences.push_back(std::move(ids));
  }

  SgnsParameters<float> params(vocab.size(), cfg.dim);
  {
    SplitMix64 init(derive_seed(cfg.rng_seed, {kTrainSalt, kInitStream}));
    const double scale = 1.0 / static_cast<double>(cfg.dim);
    for (float& x : params.input) x = static_cast<float>((init.uniform() - 0.5) * scale);
  }

  TrainingState st{cfg, vocab, sampler, sentences, params, {},
                   std::max<std::uint64_t>(1, corpus_tokens * cfg.epochs)};
  if (cfg.subsample > 0.0) {
    const double threshold = cfg.subsample * static_cast<double>(vocab.total_count());
    for (const auto& e : vocab.entries()) {
      const double f = static_cast<double>(e.count);
      st.keep_prob.push_back((std::sqrt(f / threshold) + 1.0) * threshold / f);
    }
  }

  TrainResult result;
  const std::size_t workers =
      std::clamp<std::size_t>(cfg.workers, 1, std::max<std::size_t>(1, sentences.size()));
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    ShardTotals epoch_totals;
    if (workers == 1) {
      epoch_totals = run_shard<detail::PlainAccess>(
          st, 0, sentences.size(), derive_seed(cfg.rng_seed, {kTrainSalt, epoch, 0}));
    } else {
      std::vector<ShardTotals> shard(workers);
      {
        std::vector<std::jthread> pool;
        const std::size_t per = (sentences.size() + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
          const std::size_t b = std::min(sentences.size(), w * per);
          const std::size_t e = std::min(sentences.size(), b + per);
          pool.emplace_back([&, w, b, e] {
            shard[w] = run_shard<detail::RelaxedAccess>(
                st, b, e, derive_seed(cfg.rng_seed, {kTrainSalt, epoch, w}));
          });
        }
      }
      for (const auto& s : shard) {
        epoch_totals.loss += s.loss;
        epoch_totals.pairs += s.pairs;
      }
    }
    result.pairs += epoch_totals.pairs;
    result.epoch_loss.push_back(epoch_totals.pairs
                                    ? epoch_totals.loss / static_cast<double>(epoch_totals.pairs)
                                    : 0.0);
  }

  std::vector<std::string> tokens;
  tokens.reserve(vocab.size());
  for (const auto& e : vocab.entries()) tokens.push_back(e.token);
  result.embeddings = EmbeddingTable(std::move(tokens), cfg.dim, std::move(params.input));
  return result;
}

std::string format_embeddings(const EmbeddingTable& table) {
  std::string out = std::to_string(table.size()) + " " + std::to_string(table.dim()) + "\n";
  char buf[32];
  for (std::size_t i = 0; i < table.size(); ++i) {
    out += table.tokens()[i];
    for (float x : table.row(i)) {
      std::snprintf(buf, sizeof buf, " %.6g", static_cast<double>(x));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

EmbeddingTable parse_embeddings(std::string_view text) {
  auto lines = split_lines(text);
  if (lines.empty()) throw std::runtime_error("embedding file is empty");
  auto header = split_fields(lines[0], ' ');
  double n = 0, dim = 0;
  if (header.size() != 2 || !parse_real(header[0], n) || !parse_real(header[1], dim) || n < 0 ||
      dim < 1) {
    throw std::runtime_error("embedding file: bad header");
  }
  const auto count = static_cast<std::size_t>(n);
  const auto d = static_cast<std::size_t>(dim);
  if (lines.size() < count + 1) throw std::runtime_error("embedding file: truncated");

  std::vector<std::string> tokens;
  std::vector<float> values;
  tokens.reserve(count);
  values.reserve(count * d);
  for (std::size_t i = 1; i <= count; ++i) {
    auto f = split_fields(lines[i], ' ');
    if (f.size() != d + 1) {
      throw std::runtime_error("embedding file: row " + std::to_string(i) + " has wrong width");
    }
    tokens.emplace_back(f[0]);
    for (std::size_t k = 1; k <= d; ++k) {
      double x = 0;
      if (!parse_real(f[k], x)) {
        throw std::runtime_error("embedding file: bad number on row " + std::to_string(i));
      }
      values.push_back(static_cast<float>(x));
    }
  }
  return EmbeddingTable(std::move(tokens), d, std::move(values));
}

}  // namespace owl2vec4oa
