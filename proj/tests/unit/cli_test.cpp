#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>

#include "owl2vec4oa/text_io.hpp"
#include "pipeline.hpp"

using namespace owl2vec4oa;
using namespace owl2vec4oa::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = OWL2VEC4OA_FIXTURES;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("owl2vec4oa_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args) {
    const std::string cmd = std::string(OWL2VEC4OA_CLI) + " " + args + " > " +
                            (dir_ / "stdout.txt").string() + " 2> " + (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string stderr_text() const { return read_file(dir_ / "stderr.txt"); }
  std::string fixture(const char* name) const { return (kFixtures / name).string(); }

  fs::path dir_;
};

std::string small_config() {
  return "onto = helis_fragment.nt\n"
         "onto = foodon_fragment.nt\n"
         "mappings = fructose_mappings.tsv\n"
         "pools = fructose_pools.tsv\n"
         "iterations = 5\n"
         "rng_seed = 11\n"
         "dim = 8\n"
         "epochs = 3\n";
}

}  // namespace

TEST(Config, ParsesKeysAndResolvesPaths) {
  auto cfg = parse_config(
      "# comment\n"
      "onto = a.nt\n"
      "onto = /abs/b.nt\n"
      "annotation_prop = http://x/label\n"
      "combine = intersection\n"
      "inverse_subclass = false\n"
      "walk_depth = 4\n"
      "rng_seed = 9\n"
      "replace_prob = 0.25\n"
      "dim = 12\n"
      "workers = 3\n",
      "/base");
  ASSERT_EQ(cfg.ontologies.size(), 2u);
  EXPECT_EQ(cfg.ontologies[0], fs::path("/base/a.nt"));
  EXPECT_EQ(cfg.ontologies[1], fs::path("/abs/b.nt"));
  EXPECT_EQ(cfg.projection.annotation_props, (std::vector<std::string>{"http://x/label"}));
  EXPECT_EQ(cfg.combine, Combinator::Intersection);
  EXPECT_FALSE(cfg.projection.inverse_subclass);
  EXPECT_EQ(cfg.walk.walk_depth, 4u);
  EXPECT_EQ(cfg.walk.rng_seed, 9u);
  EXPECT_EQ(cfg.corpus.rng_seed, 9u);
  EXPECT_EQ(cfg.train.rng_seed, 9u);
  EXPECT_EQ(cfg.corpus.replace_prob, 0.25);
  EXPECT_EQ(cfg.train.dim, 12u);
  EXPECT_EQ(cfg.train.workers, 3u);
  EXPECT_THROW(parse_config("unknown_key = 1\n"), InputError);
  EXPECT_THROW(parse_config("dim = ten\n"), InputError);
  EXPECT_THROW(parse_config("no equals sign\n"), InputError);
}

TEST(Config, ManifestListsEveryTunable) {
  auto cfg = load_config(kFixtures / "fragment.conf");
  auto text = format_manifest(cfg);
  for (const char* key : {"onto", "mappings", "combine", "union_rule", "intersection_rule",
                          "annotation_prop", "inverse_subclass", "lenient", "walk_depth",
                          "iterations", "rng_seed", "replace_prob", "sample_all_labels", "dim",
                          "epochs", "window", "negatives", "initial_lr", "final_lr", "min_count",
                          "unigram_power", "subsample", "pools", "output_dir", "workers", "digest"}) {
    EXPECT_NE(text.find(std::string("\n") + key + " = "), std::string::npos) << key;
  }
  auto again = parse_config(text);
  EXPECT_EQ(format_manifest(again), text);
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_F(CliTest, ProjectWritesUnitWeights) {
  ASSERT_EQ(run("project --onto " + fixture("foodon_fragment.nt") + " --out " + dir_.string()), 0)
      << stderr_text();
  auto edges = parse_edges_tsv(read_file(dir_ / "foodon_fragment.edges.tsv"));
  ASSERT_FALSE(edges.empty());
  for (const auto& e : edges) EXPECT_EQ(e.weight, 1.0);
  EXPECT_TRUE(fs::exists(dir_ / "foodon_fragment.lex.tsv"));
  EXPECT_TRUE(fs::exists(dir_ / "foodon_fragment.report.txt"));
}

TEST_F(CliTest, InverseSubclassFlag) {
  ASSERT_EQ(run("project --onto " + fixture("helis_fragment.nt") + " --inverse-subclass=false --out " +
                dir_.string()),
            0)
      << stderr_text();
  auto text = read_file(dir_ / "helis_fragment.edges.tsv");
  EXPECT_EQ(text.find("urn:owl2vec4oa:inverseSubClassOf"), std::string::npos);
  EXPECT_NE(text.find("subClassOf"), std::string::npos);
}

TEST_F(CliTest, MalformedInputFailsWithoutOutputs) {
  EXPECT_EQ(run("project --onto " + fixture("helis_fragment.nt") + " " + fixture("malformed.nt") +
                " --out " + (dir_ / "out").string()),
            kExitInput);
  EXPECT_NE(stderr_text().find("line 2"), std::string::npos) << stderr_text();
  EXPECT_FALSE(fs::exists(dir_ / "out" / "helis_fragment.edges.tsv"));
  EXPECT_FALSE(fs::exists(dir_ / "out" / "malformed.edges.tsv"));
  EXPECT_EQ(run("project --lenient --onto " + fixture("malformed.nt") + " --out " +
                (dir_ / "lenient").string()),
            0);
}

TEST_F(CliTest, UsageAndInputErrors) {
  EXPECT_EQ(run("--version"), 0);
  EXPECT_EQ(run("project"), kExitInput);
  EXPECT_EQ(run("no-such-command"), kExitInput);
  EXPECT_EQ(run("train --corpus " + (dir_ / "missing.txt").string() + " --out " +
                (dir_ / "e.txt").string()),
            kExitInput);
  EXPECT_EQ(run("train --epochs 0 --corpus " + fixture("fragment.conf") + " --out " +
                (dir_ / "e.txt").string()),
            kExitInput);
}

TEST_F(CliTest, MissingOntologyStopsBeforeAnyStage) {
  write_file(dir_ / "bad.conf", "onto = nowhere.nt\noutput_dir = out\n");
  EXPECT_EQ(run("run --config " + (dir_ / "bad.conf").string()), kExitInput);
  EXPECT_FALSE(fs::exists(dir_ / "out"));
}

TEST_F(CliTest, RunWritesEveryArtifact) {
  ASSERT_EQ(run("run --config " + fixture("fragment.conf") + " --out " + (dir_ / "run").string()), 0)
      << stderr_text();
  for (const char* name : {artifacts::kManifest, artifacts::kMappings, artifacts::kGraph,
                           artifacts::kWalks, artifacts::kStructure, artifacts::kLexical,
                           artifacts::kCombined, artifacts::kCorpus, artifacts::kEmbeddings,
                           artifacts::kLoss, artifacts::kReportTsv, artifacts::kReportTable,
                           artifacts::kRanked}) {
    EXPECT_TRUE(fs::exists(dir_ / "run" / name)) << name;
  }
  auto emb = read_file(dir_ / "run" / artifacts::kEmbeddings);
  const auto header = emb.substr(0, emb.find('\n'));
  EXPECT_EQ(header.substr(header.find(' ')), " 100");
  EXPECT_EQ(parse_embeddings(emb).dim(), 100u);
}

TEST_F(CliTest, RunEqualsChainedSubcommands) {
  write_file(dir_ / "small.conf", small_config());
  for (const char* f : {"helis_fragment.nt", "foodon_fragment.nt", "fructose_mappings.tsv", "fructose_pools.tsv"}) {
    fs::copy_file(kFixtures / f, dir_ / f);
  }
  ASSERT_EQ(run("run --config " + (dir_ / "small.conf").string() + " --out " + (dir_ / "run").string()), 0)
      << stderr_text();

  const std::string c = (dir_ / "chain").string();
  const std::string g = "--rng-seed 11 ";
  ASSERT_EQ(run(g + "project --onto " + fixture("helis_fragment.nt") + " " + fixture("foodon_fragment.nt") +
                " --out " + c + "/projection"),
            0);
  ASSERT_EQ(run(g + "merge --edges " + c + "/projection/helis_fragment.edges.tsv " + c +
                "/projection/foodon_fragment.edges.tsv --mappings " + fixture("fructose_mappings.tsv") +
                " --out " + c + "/graph.tsv --mappings-out " + c + "/mappings.tsv"),
            0);
  ASSERT_EQ(run(g + "walk --graph " + c + "/graph.tsv --mappings " + fixture("fructose_mappings.tsv") +
                " --iterations 5 --out " + c + "/walks.txt"),
            0);
  ASSERT_EQ(run(g + "corpus --walks " + c + "/walks.txt --lex " + c +
                "/projection/helis_fragment.lex.tsv " + c + "/projection/foodon_fragment.lex.tsv --out " + c),
            0);
  ASSERT_EQ(run(g + "train --corpus " + c + "/corpus.txt --dim 8 --epochs 3 --out " + c +
                "/embeddings.txt --loss-out " + c + "/train_loss.txt"),
            0);
  ASSERT_EQ(run("eval --embeddings " + c + "/embeddings.txt --lex " + c +
                "/projection/helis_fragment.lex.tsv " + c + "/projection/foodon_fragment.lex.tsv --pools " +
                fixture("fructose_pools.tsv") + " --out " + c + "/report.tsv"),
            0);
  ASSERT_EQ(run("rank --embeddings " + c + "/embeddings.txt --lex " + c +
                "/projection/helis_fragment.lex.tsv " + c + "/projection/foodon_fragment.lex.tsv --pools " +
                fixture("fructose_pools.tsv") + " --out " + c + "/ranked.tsv"),
            0);

  for (const char* name : {"projection/helis_fragment.edges.tsv", "projection/foodon_fragment.lex.tsv",
                           "projection/foodon_fragment.report.txt", artifacts::kMappings,
                           artifacts::kGraph, artifacts::kWalks, artifacts::kStructure,
                           artifacts::kLexical, artifacts::kCombined, artifacts::kCorpus,
                           artifacts::kEmbeddings, artifacts::kLoss, artifacts::kReportTsv,
                           artifacts::kRanked}) {
    EXPECT_EQ(read_file(dir_ / "run" / name), read_file(dir_ / "chain" / name)) << name;
  }
}

TEST_F(CliTest, ManifestReproducesRun) {
  write_file(dir_ / "small.conf", small_config());
  for (const char* f : {"helis_fragment.nt", "foodon_fragment.nt", "fructose_mappings.tsv", "fructose_pools.tsv"}) {
    fs::copy_file(kFixtures / f, dir_ / f);
  }
  ASSERT_EQ(run("run --config " + (dir_ / "small.conf").string() + " --out " + (dir_ / "a").string()), 0);
  fs::copy_file(dir_ / "a" / artifacts::kManifest, dir_ / "manifest.conf");
  ASSERT_EQ(run("run --config " + (dir_ / "manifest.conf").string() + " --out " + (dir_ / "b").string()), 0)
      << stderr_text();
  for (const char* name : {artifacts::kWalks, artifacts::kCorpus, artifacts::kEmbeddings,
                           artifacts::kReportTsv}) {
    EXPECT_EQ(read_file(dir_ / "a" / name), read_file(dir_ / "b" / name)) << name;
  }
}
