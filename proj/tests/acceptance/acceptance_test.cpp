#include <gtest/gtest.h>
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <random>
#include <set>

#include "oracles.hpp"
#include "owl2vec4oa/random.hpp"
#include "owl2vec4oa/text_io.hpp"
#include "pipeline.hpp"
#include "synthetic.hpp"

using namespace owl2vec4oa;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = OWL2VEC4OA_FIXTURES;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

fs::path scratch_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("owl2vec4oa_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(OWL2VEC4OA_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

// Transition probabilities on a hand-weighted 6-vertex graph, then empirical
// first-step frequencies.
TEST(Acceptance, Criterion1_TransitionFidelity) {
  const auto start = std::chrono::steady_clock::now();
  const std::string n = "http://hand.example/";
  const std::string l = "http://hand.example/rel";
  GraphBuilder b;
  b.add_edge(n + "A", l, n + "B", 1.0);
  b.add_edge(n + "A", l, n + "C", 0.9);
  b.add_edge(n + "A", l, n + "D", 0.5);
  b.add_edge(n + "B", l, n + "C", 0.25);
  b.add_edge(n + "B", l, n + "E", 0.75);
  b.add_edge(n + "C", l, n + "A", 0.6);
  b.add_edge(n + "D", l, n + "E", 0.3);
  b.add_edge(n + "D", l, n + "F", 0.3);
  b.add_edge(n + "D", l, n + "A", 0.3);
  b.add_edge(n + "D", l, n + "B", 0.1);
  b.add_edge(n + "E", l, n + "F", 1.0);
  b.add_edge(n + "E", l, n + "A", 0.2);
  auto g = b.build();
  ASSERT_EQ(g.vertex_count(), 6u);

  // Hand-computed w / sum(w) per source vertex.
  const std::map<std::string, std::map<std::string, double>> expected{
      {"A", {{"B", 0.4166666666666667}, {"C", 0.375}, {"D", 0.20833333333333334}}},
      {"B", {{"C", 0.25}, {"E", 0.75}}},
      {"C", {{"A", 1.0}}},
      {"D", {{"E", 0.3}, {"F", 0.3}, {"A", 0.3}, {"B", 0.1}}},
      {"E", {{"F", 0.8333333333333334}, {"A", 0.16666666666666669}}},
  };
  EXPECT_THROW(transition_distribution(g, *g.find_vertex(n + "F")), EmptyFrontier);

  for (const auto& [src, targets] : expected) {
    const VertexId v = *g.find_vertex(n + src);
    auto dist = transition_distribution(g, v);
    ASSERT_EQ(dist.size(), targets.size());
    for (const auto& [edge, p] : dist) {
      EXPECT_NEAR(p, targets.at(g.uri(edge.target).substr(n.size())), 1e-12) << src;
    }

    constexpr std::size_t kWalks = 100000;
    std::vector<std::string> seeds{n + src};
    auto walks = generate_walks(g, seeds, {.walk_depth = 2, .iterations = kWalks, .rng_seed = 20240});
    ASSERT_EQ(walks.walks.size(), kWalks);
    std::map<std::string, std::size_t> counts;
    for (const auto& w : walks.walks) {
      ASSERT_EQ(w.tokens.size(), 3u);
      ++counts[g.uri(w.tokens[2]).substr(n.size())];
    }
    for (const auto& [tgt, p] : targets) {
      const double freq = static_cast<double>(counts[tgt]) / kWalks;
      EXPECT_NEAR(freq, p, 0.01) << src << " -> " << tgt;
    }
  }
  EXPECT_LT(seconds_since(start), 10.0);
}

// Structural invariants of generated walks over random graphs and configs.
TEST(Acceptance, Criterion2_WalkStructure) {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2718);
  std::uniform_real_distribution<double> weight(0.05, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t vertices = 1 + rng() % 25;
    const std::size_t edges = rng() % (3 * vertices + 1);
    GraphBuilder b;
    for (std::size_t v = 0; v < vertices; ++v) b.add_vertex("http://g/v" + std::to_string(v));
    std::set<std::tuple<std::size_t, std::size_t, std::size_t>> edge_set;
    for (std::size_t e = 0; e < edges; ++e) {
      const auto s = rng() % vertices, t = rng() % vertices, l = rng() % 3;
      if (s == t) continue;
      edge_set.emplace(s, l, t);
      b.add_edge("http://g/v" + std::to_string(s), "http://g/l" + std::to_string(l),
                 "http://g/v" + std::to_string(t), weight(rng));
    }
    auto g = b.build();

    std::vector<std::string> seeds;
    std::size_t in_graph = 0;
    const std::size_t seed_count = 1 + rng() % 8;
    for (std::size_t i = 0; i < seed_count; ++i) {
      if (rng() % 5 == 0) {
        seeds.push_back("http://elsewhere/" + std::to_string(i));
      } else {
        seeds.push_back("http://g/v" + std::to_string(rng() % vertices));
        ++in_graph;
      }
    }
    WalkConfig cfg{.walk_depth = 1 + rng() % 6, .iterations = 1 + rng() % 3, .rng_seed = rng()};
    auto result = generate_walks(g, seeds, cfg, 1 + static_cast<unsigned>(rng() % 3));
    ASSERT_EQ(result.walks.size(), cfg.iterations * in_graph);

    std::vector<std::string> present;
    for (const auto& s : seeds) {
      if (g.find_vertex(s)) present.push_back(s);
    }
    for (std::size_t w = 0; w < result.walks.size(); ++w) {
      auto iris = walk_iris(g, result.walks[w]);
      const std::size_t len = iris.size();
      ASSERT_EQ(len % 2, 1u);
      ASSERT_LE(len, 2 * cfg.walk_depth - 1);
      ASSERT_EQ(iris[0], present[w % present.size()]);
      for (std::size_t i = 0; i + 2 < len; i += 2) {
        auto idx = [](const std::string& iri) {
          return static_cast<std::size_t>(std::stoul(iri.substr(iri.rfind('/') + 2)));
        };
        ASSERT_EQ(iris[i].rfind("http://g/v", 0), 0u);
        ASSERT_EQ(iris[i + 1].rfind("http://g/l", 0), 0u);
        ASSERT_TRUE(edge_set.count({idx(iris[i]), idx(iris[i + 1]), idx(iris[i + 2])}));
      }
      if ((len + 1) / 2 < cfg.walk_depth) {
        ASSERT_TRUE(g.out_edges(*g.find_vertex(iris.back())).empty());
      }
    }
  }
  EXPECT_LT(seconds_since(start), 30.0);
}

// Analytic SGNS gradient against central finite differences in long double.
TEST(Acceptance, Criterion3_GradientCheck) {
  using Real = long double;
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1618);
  Real worst = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t vocab = 2 + rng() % 9;
    const std::size_t dim = 1 + rng() % 8;
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    SgnsParameters<Real> p(vocab, dim);
    for (auto& x : p.input) x = d(rng);
    for (auto& x : p.output) x = d(rng);
    const auto center = static_cast<TokenIndex>(rng() % vocab);
    const auto context = static_cast<TokenIndex>(rng() % vocab);
    std::vector<TokenIndex> neg(rng() % 6);
    for (auto& k : neg) k = static_cast<TokenIndex>(rng() % vocab);
    const std::span<const TokenIndex> ns(neg);
    auto loss = [&] { return sgns_loss(p, center, context, ns); };

    std::vector<Real> fd_in, fd_out;
    for (auto& x : p.input) fd_in.push_back(test_support::central_difference(loss, x, Real(1e-4)));
    for (auto& x : p.output) fd_out.push_back(test_support::central_difference(loss, x, Real(1e-4)));

    auto q = p;
    sgns_step(q, center, context, ns, Real(1));  // lr = 1: delta = -gradient
    Real err = 0, ref = 0;
    for (std::size_t i = 0; i < p.input.size(); ++i) {
      err = std::max(err, std::fabs((p.input[i] - q.input[i]) - fd_in[i]));
      ref = std::max(ref, std::fabs(fd_in[i]));
    }
    for (std::size_t i = 0; i < p.output.size(); ++i) {
      err = std::max(err, std::fabs((p.output[i] - q.output[i]) - fd_out[i]));
      ref = std::max(ref, std::fabs(fd_out[i]));
    }
    ASSERT_GT(ref, 0);
    worst = std::max(worst, err / ref);
  }
  std::printf("  worst relative gradient error: %.3Le\n", worst);
  EXPECT_LT(worst, 1e-5L);
  EXPECT_LT(seconds_since(start), 5.0);
}

// Empirical negative-sampling frequencies against count^0.75 / Z.
TEST(Acceptance, Criterion4_NegativeTable) {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<std::uint64_t> counts{1, 2, 3, 5, 8, 13, 21, 34, 55, 89, 144, 1000};
  std::vector<Sentence> corpus;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    corpus.push_back(Sentence(counts[i], "tok" + std::to_string(i)));
  }
  auto vocab = Vocabulary::build(corpus);
  NegativeSampler sampler(vocab, 0.75);

  double z = 0;
  for (auto c : counts) z += std::pow(static_cast<double>(c), 0.75);
  std::vector<std::size_t> hits(vocab.size(), 0);
  SplitMix64 rng(99);
  constexpr std::size_t kDraws = 1000000;
  for (std::size_t i = 0; i < kDraws; ++i) ++hits[sampler.sample(rng.uniform())];
  for (TokenIndex t = 0; t < vocab.size(); ++t) {
    const double expected = std::pow(static_cast<double>(vocab[t].count), 0.75) / z;
    EXPECT_NEAR(static_cast<double>(hits[t]) / kDraws, expected, 0.005) << vocab[t].token;
  }
  EXPECT_LT(seconds_since(start), 5.0);
}

// evaluate() against a brute-force sort on random pools with forced ties.
TEST(Acceptance, Criterion5_MetricOracle) {
  std::mt19937_64 rng(31415);
  std::uniform_int_distribution<int> coord(-2, 2);
  auto check_monotone = [](const RankingReport& r) {
    for (std::size_t i = 1; i < r.hits.size(); ++i) ASSERT_LE(r.hits[i - 1], r.hits[i]);
    ASSERT_GE(r.mrr, r.hits_at(1));
    ASSERT_LE(r.mrr, 1.0);
  };

  // A small integer lattice makes exact cosine ties common.
  std::vector<std::string> tokens;
  std::vector<float> values;
  const std::size_t dim = 2;
  for (int i = 0; i < 40; ++i) {
    tokens.push_back("http://pool.example/e" + std::to_string(i));
    int x = 0, y = 0;
    while (x == 0 && y == 0) x = coord(rng), y = coord(rng);
    values.push_back(static_cast<float>(x));
    values.push_back(static_cast<float>(y));
  }
  EmbeddingTable emb(tokens, dim, values);
  LexicalTable lex;

  auto oracle_score = [&](const std::string& a, const std::string& b) {
    auto va = emb.find(a), vb = emb.find(b);
    if (!va || !vb) return kAbsentScore;
    double dot = 0, na = 0, nb = 0;
    for (std::size_t i = 0; i < dim; ++i) {
      dot += double((*va)[i]) * (*vb)[i];
      na += double((*va)[i]) * (*va)[i];
      nb += double((*vb)[i]) * (*vb)[i];
    }
    return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
  };

  std::vector<CandidatePool> pools;
  std::vector<std::size_t> oracle_ranks;
  for (int p = 0; p < 500; ++p) {
    CandidatePool pool;
    pool.source = tokens[rng() % tokens.size()];
    std::set<std::string> chosen;
    const std::size_t size = 1 + rng() % 10;
    while (chosen.size() < size) {
      chosen.insert(rng() % 8 == 0 ? "http://pool.example/absent" + std::to_string(rng() % 4)
                                   : tokens[rng() % tokens.size()]);
    }
    pool.candidates.assign(chosen.begin(), chosen.end());
    std::shuffle(pool.candidates.begin(), pool.candidates.end(), rng);
    const std::size_t t = rng() % size;
    pool.true_target = pool.candidates[t];

    std::vector<double> scores;
    for (const auto& c : pool.candidates) scores.push_back(oracle_score(pool.source, c));
    oracle_ranks.push_back(test_support::brute_force_rank(scores, pool.candidates, t));

    std::vector<CandidatePool> one{pool};
    auto single = evaluate(one, emb, lex);
    ASSERT_EQ(single.ranks[0], oracle_ranks.back());
    check_monotone(single);
    pools.push_back(std::move(pool));
  }

  auto report = evaluate(pools, emb, lex);
  const std::vector<std::size_t> ks(kHitsAt.begin(), kHitsAt.end());
  auto oracle = test_support::brute_force_metrics(oracle_ranks, ks);
  EXPECT_EQ(report.ranks, oracle_ranks);
  EXPECT_NEAR(report.mrr, oracle.mrr, 1e-12);
  for (std::size_t i = 0; i < ks.size(); ++i) EXPECT_NEAR(report.hits[i], oracle.hits[i], 1e-12);
  check_monotone(report);
}

// Two single-worker runs of the binary produce identical artifacts.
TEST(Acceptance, Criterion6_Determinism) {
  auto dir = scratch_dir("determinism");
  const std::string conf = (kFixtures / "fragment.conf").string();
  ASSERT_EQ(run_cli("--workers 1 run --config " + conf + " --out " + (dir / "a").string(), dir / "a.log"), 0)
      << read_file(dir / "a.log");
  ASSERT_EQ(run_cli("--workers 1 run --config " + conf + " --out " + (dir / "b").string(), dir / "b.log"), 0)
      << read_file(dir / "b.log");
  for (const char* name : {cli::artifacts::kWalks, cli::artifacts::kStructure, cli::artifacts::kLexical,
                           cli::artifacts::kCombined, cli::artifacts::kCorpus,
                           cli::artifacts::kEmbeddings}) {
    const auto a = read_file(dir / "a" / name);
    EXPECT_FALSE(a.empty()) << name;
    EXPECT_EQ(a, read_file(dir / "b" / name)) << name;
  }
  fs::remove_all(dir);
}

namespace {

RankingReport run_synthetic(const test_support::SyntheticTask& task, bool with_seed_mappings) {
  std::vector<std::vector<ProjectedEdge>> parts;
  LexicalTable lex;
  for (const auto* nt : {&task.source_nt, &task.target_nt}) {
    auto projected = project(parse_document(*nt).triples);
    parts.push_back(std::move(projected.edges));
    lex.merge(projected.lexical);
  }
  const MappingSet none;
  const MappingSet& mappings = with_seed_mappings ? task.seed_mappings : none;
  auto graph = merge(parts, mappings);

  // Without mappings the walks start from every entity, as in the
  // single-ontology embedding setting.
  std::vector<std::string> seeds;
  if (with_seed_mappings) {
    for (const auto& e : seed_entities(mappings)) seeds.push_back(e.str());
  } else {
    for (VertexId v = 0; v < graph.vertex_count(); ++v) seeds.push_back(graph.uri(v));
  }

  auto walks = generate_walks(graph, seeds, {.walk_depth = 4, .iterations = 20, .rng_seed = 42});
  std::vector<Sentence> sentences;
  for (const auto& w : walks.walks) sentences.push_back(walk_iris(graph, w));
  auto docs = build_documents(sentences, lex, {.replace_prob = 0.5, .rng_seed = 42});

  TrainConfig cfg;  // dim 100, 70 epochs
  auto trained = train(docs.merged(), cfg);
  return evaluate(task.pools, trained.embeddings, lex);
}

}  // namespace

// Seeded alignment beats both random ranking and the unbridged baseline.
TEST(Acceptance, Criterion7_SyntheticAlignment) {
  const auto start = std::chrono::steady_clock::now();
  auto task = test_support::make_synthetic_task();
  ASSERT_EQ(task.pairs.size(), 200u);
  ASSERT_EQ(task.seed_mappings.size(), 100u);
  ASSERT_EQ(task.pools.size(), 100u);
  for (const auto& p : task.pools) ASSERT_EQ(p.candidates.size(), 50u);

  auto merged = run_synthetic(task, true);
  auto baseline = run_synthetic(task, false);
  std::printf("  merged:   MRR %.4f  Hits@1 %.3f  Hits@10 %.3f\n", merged.mrr, merged.hits_at(1),
              merged.hits_at(10));
  std::printf("  baseline: MRR %.4f  Hits@1 %.3f  Hits@10 %.3f\n", baseline.mrr,
              baseline.hits_at(1), baseline.hits_at(10));
  std::printf("  elapsed: %.1f s\n", seconds_since(start));

  EXPECT_GE(merged.hits_at(10), 0.4);
  EXPECT_GT(merged.mrr, baseline.mrr);
  EXPECT_GT(merged.hits_at(10), baseline.hits_at(10));
  EXPECT_LT(seconds_since(start), 600.0);
}

// The fructose walk through the 0.9 mapping appears in a seeded run.
TEST(Acceptance, Criterion8_FructoseWalk) {
  auto dir = scratch_dir("fructose_walk");
  write_file(dir / "walk.conf",
             "onto = " + (kFixtures / "helis_fragment.nt").string() + "\n" +
             "onto = " + (kFixtures / "foodon_fragment.nt").string() + "\n" +
             "mappings = " + (kFixtures / "fructose_mappings.tsv").string() + "\n" +
             "walk_depth = 3\niterations = 500\nrng_seed = 8\ndim = 10\nepochs = 1\n");
  ASSERT_EQ(run_cli("--workers 1 run --config " + (dir / "walk.conf").string() + " --out " +
                        (dir / "out").string(),
                    dir / "run.log"),
            0)
      << read_file(dir / "run.log");

  const std::string h = "http://www.fbk.eu/ontologies/virtualcoach#";
  const std::string obo = "http://purl.obolibrary.org/obo/";
  const std::string eq(vocab::kOwlEquivalentClass), sub(vocab::kRdfsSubClassOf);

  // Occurrence probability from the persisted graph's edge weights.
  std::vector<std::tuple<std::string, std::string, std::string, double>> edges;
  for (auto line : split_lines(read_file(dir / "out" / cli::artifacts::kGraph))) {
    auto f = split_fields(line);
    if (f.size() != 4) continue;
    double w = 0;
    ASSERT_TRUE(parse_real(f[3], w));
    edges.emplace_back(std::string(f[0]), std::string(f[1]), std::string(f[2]), w);
  }
  const double p = test_support::direct_transition_probability(edges, h + "Fructose", eq, obo + "FOODON_03301305") *
                   test_support::direct_transition_probability(edges, obo + "FOODON_03301305", sub,
                                                          obo + "FOODON_03420108");
  EXPECT_NEAR(p, 0.24930747922437677, 1e-12);

  const auto walks = parse_sentences(read_file(dir / "out" / cli::artifacts::kWalks));
  ASSERT_EQ(walks.size(), 1000u);
  const Sentence expected{h + "Fructose", eq, obo + "FOODON_03301305", sub, obo + "FOODON_03420108"};
  std::size_t from_fructose = 0, found = 0;
  for (const auto& w : walks) {
    from_fructose += w.front() == h + "Fructose" ? 1 : 0;
    found += w == expected ? 1 : 0;
  }
  const double at_least_once = 1.0 - std::pow(1.0 - p, static_cast<double>(from_fructose));
  std::printf("  %zu of %zu walks start at Fructose; P(at least one) = %.12f; found %zu\n",
              from_fructose, walks.size(), at_least_once, found);
  EXPECT_GT(at_least_once, 0.999);
  EXPECT_GT(found, 0u);
  fs::remove_all(dir);
}

namespace {

class CriterionPrinter : public ::testing::EmptyTestEventListener {
  void OnTestEnd(const ::testing::TestInfo& info) override {
    const std::string name = info.name();
    const auto us = name.find('_');
    const std::string number = name.substr(std::string("Criterion").size(),
                                           us - std::string("Criterion").size());
    std::printf("[criterion %s] %s %s\n", number.c_str(), info.result()->Passed() ? "PASS" : "FAIL",
                name.substr(us + 1).c_str());
    std::fflush(stdout);
  }
};

}  // namespace

int main(int argc, char** argv) {
  ::testing::InitGoogleTest(&argc, argv);
  ::testing::UnitTest::GetInstance()->listeners().Append(new CriterionPrinter);
  return RUN_ALL_TESTS();
}
