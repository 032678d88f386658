#pragma once

#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "owl2vec4oa/corpus.hpp"

namespace owl2vec4oa {

using TokenIndex = std::uint32_t;

class EmptyCorpus : public std::runtime_error {
 public:
  EmptyCorpus() : std::runtime_error("corpus has no token at or above min_count") {}
};

/// Tokens ordered by descending count, ties by ascending byte order.
class Vocabulary {
 public:
  struct Entry {
    std::string token;
    std::uint64_t count;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  /// Throws EmptyCorpus when nothing survives min_count.
  static Vocabulary build(std::span<const Sentence> corpus, std::uint64_t min_count = 1);

  std::size_t size() const noexcept { return entries_.size(); }
  const Entry& operator[](TokenIndex i) const { return entries_.at(i); }
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::optional<TokenIndex> find(std::string_view token) const;
  std::uint64_t total_count() const noexcept { return total_; }

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, TokenIndex> index_;
  std::uint64_t total_ = 0;
};

/// Draws token i with probability count(i)^power / sum_j count(j)^power by
/// inverse CDF over the exact cumulative distribution.
class NegativeSampler {
 public:
  NegativeSampler(const Vocabulary& vocab, double power);

  double probability(TokenIndex i) const;
  /// u uniform in [0, 1).
  TokenIndex sample(double u) const;
  std::size_t size() const noexcept { return cumulative_.size(); }

 private:
  std::vector<double> cumulative_;
};

struct TrainConfig {
  std::size_t dim = 100;
  std::size_t epochs = 70;
  std::size_t window = 5;
  std::size_t negatives = 5;
  double initial_lr = 0.025;
  double final_lr = 1e-4;
  std::uint64_t min_count = 1;
  double unigram_power = 0.75;
  double subsample = 0.0;  // frequent-token subsampling threshold; 0 disables
  std::uint64_t rng_seed = 42;
  unsigned workers = 1;    // 1 = deterministic; >1 = lock-free, not reproducible

  /// Throws std::invalid_argument on any violated invariant.
  void validate() const;
};

/// Input (published) and output (context) matrices, row-major |V| x dim.
template <class Real>
struct SgnsParameters {
  std::size_t dim = 0;
  std::vector<Real> input;
  std::vector<Real> output;

  SgnsParameters() = default;
  SgnsParameters(std::size_t vocab_size, std::size_t dimension)
      : dim(dimension), input(vocab_size * dimension), output(vocab_size * dimension) {}

  std::span<Real> in_row(TokenIndex i) { return {input.data() + i * dim, dim}; }
  std::span<Real> out_row(TokenIndex i) { return {output.data() + i * dim, dim}; }
  std::span<const Real> in_row(TokenIndex i) const { return {input.data() + i * dim, dim}; }
  std::span<const Real> out_row(TokenIndex i) const { return {output.data() + i * dim, dim}; }
};

namespace detail {

template <class Real>
Real sigmoid(Real x) {
  if (x >= 0) return Real(1) / (Real(1) + std::exp(-x));
  const Real e = std::exp(x);
  return e / (Real(1) + e);
}

/// log(1 + exp(x)) without overflow.
template <class Real>
Real softplus(Real x) {
  return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

struct PlainAccess {
  template <class Real>
  static Real load(const Real* p) { return *p; }
  template <class Real>
  static void add(Real* p, Real delta) { *p += delta; }
};

// Hogwild-style access: relaxed element loads and stores, concurrent updates
// may be lost but never tear.
struct RelaxedAccess {
  template <class Real>
  static Real load(const Real* p) {
    return std::atomic_ref<Real>(*const_cast<Real*>(p)).load(std::memory_order_relaxed);
  }
  template <class Real>
  static void add(Real* p, Real delta) {
    std::atomic_ref<Real> ref(*p);
    ref.store(ref.load(std::memory_order_relaxed) + delta, std::memory_order_relaxed);
  }
};

template <class Real>
struct StepScratch {
  std::vector<Real> center;
  std::vector<Real> grad;
  std::vector<Real> coeff;
};

// All dot products and gradients are taken at the pre-update parameters, so
// repeated negatives contribute exactly their share of the analytic gradient.
template <class Access, class Real>
Real sgns_kernel(Real* input, Real* output, std::size_t dim, TokenIndex center,
                 TokenIndex context, std::span<const TokenIndex> negatives, Real lr,
                 StepScratch<Real>& s) {
  const std::size_t targets = negatives.size() + 1;
  auto target = [&](std::size_t t) { return t == 0 ? context : negatives[t - 1]; };

  s.center.resize(dim);
  s.grad.assign(dim, Real(0));
  s.coeff.resize(targets);
  Real* vc = input + static_cast<std::size_t>(center) * dim;
  for (std::size_t i = 0; i < dim; ++i) s.center[i] = Access::load(vc + i);

  Real loss = 0;
  for (std::size_t t = 0; t < targets; ++t) {
    const Real* u = output + static_cast<std::size_t>(target(t)) * dim;
    Real f = 0;
    for (std::size_t i = 0; i < dim; ++i) f += s.center[i] * Access::load(u + i);
    const Real label = t == 0 ? Real(1) : Real(0);
    loss += t == 0 ? softplus(-f) : softplus(f);
    s.coeff[t] = lr * (label - sigmoid(f));
    for (std::size_t i = 0; i < dim; ++i) s.grad[i] += s.coeff[t] * Access::load(u + i);
  }
  for (std::size_t t = 0; t < targets; ++t) {
    Real* u = output + static_cast<std::size_t>(target(t)) * dim;
    for (std::size_t i = 0; i < dim; ++i) Access::add(u + i, s.coeff[t] * s.center[i]);
  }
  for (std::size_t i = 0; i < dim; ++i) Access::add(vc + i, s.grad[i]);
  return loss;
}

}  // namespace detail

/// -log sigma(u_o . v_c) - sum_k log sigma(-u_k . v_c), without updating.
template <class Real>
Real sgns_loss(const SgnsParameters<Real>& p, TokenIndex center, TokenIndex context,
               std::span<const TokenIndex> negatives) {
  auto dot = [&](TokenIndex o) {
    Real f = 0;
    auto vc = p.in_row(center);
    auto u = p.out_row(o);
    for (std::size_t i = 0; i < p.dim; ++i) f += vc[i] * u[i];
    return f;
  };
  Real loss = detail::softplus(-dot(context));
  for (TokenIndex n : negatives) loss += detail::softplus(dot(n));
  return loss;
}

/// One SGD step on the loss above; returns the loss before the update.
template <class Real>
Real sgns_step(SgnsParameters<Real>& p, TokenIndex center, TokenIndex context,
               std::span<const TokenIndex> negatives, Real lr) {
  detail::StepScratch<Real> scratch;
  return detail::sgns_kernel<detail::PlainAccess>(p.input.data(), p.output.data(), p.dim, center,
                                                  context, negatives, lr, scratch);
}

/// Token vectors, row-major. Produced by train() or read from word2vec text.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::vector<std::string> tokens, std::size_t dim, std::vector<float> values);

  std::size_t size() const noexcept { return tokens_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }
  std::span<const float> row(std::size_t i) const { return {values_.data() + i * dim_, dim_}; }
  std::optional<std::span<const float>> find(std::string_view token) const;
  const std::vector<float>& values() const noexcept { return values_; }

 private:
  std::vector<std::string> tokens_;
  std::size_t dim_ = 0;
  std::vector<float> values_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct TrainResult {
  EmbeddingTable embeddings;
  std::vector<double> epoch_loss;  // mean loss per (center, context) pair
  std::uint64_t pairs = 0;
};

/// Skip-gram with negative sampling over the merged corpus.
TrainResult train(std::span<const Sentence> corpus, const TrainConfig& cfg);

/// word2vec text format: "<vocab> <dim>" then "<token> <v1> ... <vdim>",
/// floats with 6 significant digits.
std::string format_embeddings(const EmbeddingTable& table);
EmbeddingTable parse_embeddings(std::string_view text);

}  // namespace owl2vec4oa
