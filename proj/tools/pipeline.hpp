#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "owl2vec4oa/alignment.hpp"
#include "owl2vec4oa/corpus.hpp"
#include "owl2vec4oa/graph.hpp"
#include "owl2vec4oa/projection.hpp"
#include "owl2vec4oa/ranking.hpp"
#include "owl2vec4oa/sgns.hpp"
#include "owl2vec4oa/walker.hpp"

namespace owl2vec4oa::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInput = 2;

/// Bad user input: malformed files, missing paths, invalid settings.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A pipeline stage failed; `exit_code` follows the input/internal split.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& detail, int exit_code)
      : std::runtime_error("stage '" + stage + "' failed: " + detail),
        stage_(std::move(stage)),
        exit_code_(exit_code) {}
  const std::string& stage() const noexcept { return stage_; }
  int exit_code() const noexcept { return exit_code_; }

 private:
  std::string stage_;
  int exit_code_;
};

enum class Combinator { Union, Intersection };

struct PipelineConfig {
  std::vector<std::filesystem::path> ontologies;
  std::vector<std::filesystem::path> mappings;
  Combinator combine = Combinator::Union;
  ConfidenceRule union_rule = ConfidenceRule::Max;
  ConfidenceRule intersection_rule = ConfidenceRule::Mean;
  ProjectionOptions projection;
  bool lenient = false;
  WalkConfig walk;
  CorpusConfig corpus;
  TrainConfig train;
  std::optional<std::filesystem::path> pools;
  std::filesystem::path output_dir = "out";
  unsigned workers = 1;

  /// Sets the seed of every randomized stage.
  void set_rng_seed(std::uint64_t seed);
  void set_workers(unsigned n);

  /// Throws InputError if an input file is missing or a setting is invalid.
  void validate() const;
};

/// Flat "key = value" lines; '#' starts a comment line. List keys (onto,
/// mappings, annotation_prop) may repeat. Relative paths resolve against
/// `base_dir`. Throws InputError.
PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);

/// Every tunable as a loadable config, followed by "digest" lines.
std::string format_manifest(const PipelineConfig& cfg);

std::string sha256_hex(std::string_view data);

Combinator parse_combinator(std::string_view text);
ConfidenceRule parse_confidence_rule(std::string_view text);
bool parse_bool(std::string_view text);

// Stage helpers shared by `run` and the individual subcommands. Each writes
// its artifacts and returns what later stages need.

struct ProjectedOntology {
  std::string name;
  ProjectionResult result;
};

/// Parses and projects every ontology before writing anything, so a parse
/// failure leaves no partial output.
std::vector<ProjectedOntology> project_stage(const std::vector<std::filesystem::path>& ontologies,
                                             const ProjectionOptions& options, bool lenient,
                                             unsigned workers,
                                             const std::filesystem::path& out_dir);

MappingSet combine_mappings(const std::vector<std::filesystem::path>& paths, Combinator combine,
                            ConfidenceRule union_rule, ConfidenceRule intersection_rule);

std::vector<std::string> seed_iris(const MappingSet& mappings);

Documents corpus_stage(const std::vector<Sentence>& walks, const LexicalTable& lex,
                       const CorpusConfig& cfg, const std::filesystem::path& out_dir);

struct RunSummary {
  std::size_t walks = 0;
  std::size_t skipped_seeds = 0;
  std::size_t vocab = 0;
  std::optional<RankingReport> report;
};

/// project -> merge -> walk -> corpus -> train -> (eval). Every stage output
/// is persisted under cfg.output_dir together with manifest.txt.
RunSummary run_pipeline(const PipelineConfig& cfg);

/// Standard artifact names inside the output directory.
namespace artifacts {
inline constexpr const char* kProjectionDir = "projection";
inline constexpr const char* kMappings = "mappings.tsv";
inline constexpr const char* kGraph = "graph.tsv";
inline constexpr const char* kWalks = "walks.txt";
inline constexpr const char* kStructure = "structure.txt";
inline constexpr const char* kLexical = "lexical.txt";
inline constexpr const char* kCombined = "combined.txt";
inline constexpr const char* kCorpus = "corpus.txt";
inline constexpr const char* kEmbeddings = "embeddings.txt";
inline constexpr const char* kLoss = "train_loss.txt";
inline constexpr const char* kReportTsv = "report.tsv";
inline constexpr const char* kReportTable = "report.txt";
inline constexpr const char* kRanked = "ranked.tsv";
inline constexpr const char* kManifest = "manifest.txt";
}  // namespace artifacts

/// Ranked candidates per pool: "SrcEntity \t rank \t candidate \t score".
std::string format_ranked(std::span<const CandidatePool> pools, const EmbeddingTable& emb,
                          const LexicalTable& lex);

LexicalTable load_lexical_tables(const std::vector<std::filesystem::path>& paths);

/// Entry point used by main(); returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace owl2vec4oa::cli
