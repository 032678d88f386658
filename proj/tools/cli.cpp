#include <CLI11.hpp>

#include <iostream>

#include "owl2vec4oa/ntriples.hpp"
#include "owl2vec4oa/text_io.hpp"
#include "pipeline.hpp"

namespace owl2vec4oa::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "owl2vec4oa 0.1.0";

struct GlobalOptions {
  unsigned workers = 1;
  std::optional<std::uint64_t> rng_seed;
  std::uint64_t seed_or_default() const { return rng_seed.value_or(42); }
};

struct MappingOptions {
  std::vector<std::string> files;
  std::string combine = "union";
  std::string union_rule = "max";
  std::string intersection_rule = "mean";

  void attach(CLI::App* cmd, bool required) {
    auto* opt = cmd->add_option("--mappings", files, "Seed mapping TSV file(s)");
    if (required) opt->required();
    cmd->add_option("--combine", combine, "union | intersection")->capture_default_str();
    cmd->add_option("--union-rule", union_rule, "Confidence on union collision: max|min|mean")
        ->capture_default_str();
    cmd->add_option("--intersection-rule", intersection_rule,
                    "Confidence on intersection: max|min|mean")
        ->capture_default_str();
  }

  MappingSet load() const {
    std::vector<fs::path> paths(files.begin(), files.end());
    return combine_mappings(paths, parse_combinator(combine), parse_confidence_rule(union_rule),
                            parse_confidence_rule(intersection_rule));
  }
};

std::vector<fs::path> to_paths(const std::vector<std::string>& v) {
  return {v.begin(), v.end()};
}

int report_error(const std::exception& e, int code) {
  std::cerr << "error: " << e.what() << '\n';
  return code;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Ontology embeddings for alignment: projection, biased walks, skip-gram, ranking"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  app.add_option("--workers", global.workers, "Worker threads; 1 forces deterministic mode")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--rng-seed", global.rng_seed, "Seed for every randomized stage (default 42)");

  // project
  auto* project_cmd = app.add_subcommand("project", "Project ontologies to edge lists");
  std::vector<std::string> onto_files;
  std::string project_out;
  bool inverse_subclass = true;
  bool lenient = false;
  std::vector<std::string> annotation_props;
  project_cmd->add_option("--onto", onto_files, "N-Triples ontology file(s)")->required();
  project_cmd->add_option("--out", project_out, "Output directory")->required();
  project_cmd->add_option("--inverse-subclass", inverse_subclass,
                          "Emit inverse subClassOf edges")
      ->capture_default_str();
  project_cmd->add_option("--annotation-prop", annotation_props,
                          "Label properties in priority order (replaces the defaults)");
  project_cmd->add_flag("--lenient", lenient, "Skip malformed lines instead of failing");

  // merge
  auto* merge_cmd = app.add_subcommand("merge", "Merge edge lists and seed mappings");
  std::vector<std::string> edge_files;
  std::string graph_out;
  std::string mappings_out;
  MappingOptions merge_mappings;
  merge_cmd->add_option("--edges", edge_files, "Projected edge TSV file(s)")->required();
  merge_mappings.attach(merge_cmd, false);
  merge_cmd->add_option("--out", graph_out, "Merged graph TSV")->required();
  merge_cmd->add_option("--mappings-out", mappings_out, "Write the combined mapping set");

  // walk
  auto* walk_cmd = app.add_subcommand("walk", "Biased random walks from seed entities");
  std::string graph_in;
  std::string seeds_file;
  std::string walks_out;
  WalkConfig walk_cfg;
  MappingOptions walk_mappings;
  walk_cmd->add_option("--graph", graph_in, "Merged graph TSV")->required();
  walk_mappings.attach(walk_cmd, false);
  walk_cmd->add_option("--seeds", seeds_file, "Seed IRIs, one per line (instead of --mappings)");
  walk_cmd->add_option("--depth", walk_cfg.walk_depth, "Walk depth (vertices)")
      ->capture_default_str();
  walk_cmd->add_option("--iterations", walk_cfg.iterations, "Passes over the seeds")
      ->capture_default_str();
  walk_cmd->add_option("--out", walks_out, "Walk file")->required();

  // corpus
  auto* corpus_cmd = app.add_subcommand("corpus", "Build structure/lexical/combined documents");
  std::string walks_in;
  std::vector<std::string> lex_files;
  std::string corpus_out;
  CorpusConfig corpus_cfg;
  corpus_cmd->add_option("--walks", walks_in, "Walk file")->required();
  corpus_cmd->add_option("--lex", lex_files, "Lexical TSV file(s)");
  corpus_cmd->add_option("--replace-prob", corpus_cfg.replace_prob,
                         "Per-occurrence replacement probability in the combined document")
      ->capture_default_str();
  corpus_cmd->add_flag("--sample-all-labels", corpus_cfg.sample_all_labels,
                       "Sample uniformly among labels instead of using the primary one");
  corpus_cmd->add_option("--out", corpus_out, "Output directory")->required();

  // train
  auto* train_cmd = app.add_subcommand("train", "Train skip-gram embeddings");
  std::string corpus_in;
  std::string embeddings_out;
  std::string loss_out;
  TrainConfig train_cfg;
  train_cmd->add_option("--corpus", corpus_in, "Corpus file")->required();
  train_cmd->add_option("--out", embeddings_out, "Embedding file (word2vec text)")->required();
  train_cmd->add_option("--loss-out", loss_out, "Per-epoch mean loss");
  train_cmd->add_option("--dim", train_cfg.dim)->capture_default_str();
  train_cmd->add_option("--epochs", train_cfg.epochs)->capture_default_str();
  train_cmd->add_option("--window", train_cfg.window)->capture_default_str();
  train_cmd->add_option("--negatives", train_cfg.negatives)->capture_default_str();
  train_cmd->add_option("--initial-lr", train_cfg.initial_lr)->capture_default_str();
  train_cmd->add_option("--final-lr", train_cfg.final_lr)->capture_default_str();
  train_cmd->add_option("--min-count", train_cfg.min_count)->capture_default_str();
  train_cmd->add_option("--unigram-power", train_cfg.unigram_power)->capture_default_str();
  train_cmd->add_option("--subsample", train_cfg.subsample)->capture_default_str();

  // rank / eval
  std::string emb_in;
  std::vector<std::string> rank_lex;
  std::string pools_in;
  std::string rank_out;
  auto* rank_cmd = app.add_subcommand("rank", "Rank candidate targets by cosine similarity");
  rank_cmd->add_option("--embeddings", emb_in)->required();
  rank_cmd->add_option("--lex", rank_lex, "Lexical TSV file(s) for the label fallback");
  rank_cmd->add_option("--pools", pools_in, "Candidate pool TSV")->required();
  rank_cmd->add_option("--out", rank_out, "Ranked candidates TSV")->required();

  auto* eval_cmd = app.add_subcommand("eval", "MRR and Hits@K over candidate pools");
  std::string report_out;
  eval_cmd->add_option("--embeddings", emb_in)->required();
  eval_cmd->add_option("--lex", rank_lex, "Lexical TSV file(s) for the label fallback");
  eval_cmd->add_option("--pools", pools_in, "Candidate pool TSV")->required();
  eval_cmd->add_option("--out", report_out, "Report TSV (the table is always printed)");

  // run
  auto* run_cmd = app.add_subcommand("run", "Run the whole pipeline from a config file");
  std::string config_path;
  std::string run_out;
  run_cmd->add_option("--config", config_path, "key = value config file")->required();
  run_cmd->add_option("--out", run_out, "Override output_dir");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*project_cmd) {
      ProjectionOptions options;
      options.inverse_subclass = inverse_subclass;
      if (!annotation_props.empty()) options.annotation_props = annotation_props;
      for (const auto& f : onto_files) {
        if (!fs::is_regular_file(f)) throw InputError("ontology file not found: " + f);
      }
      auto projected =
          project_stage(to_paths(onto_files), options, lenient, global.workers, project_out);
      for (const auto& p : projected) {
        std::cerr << "[project] " << p.name << ": " << p.result.edges.size() << " edges, "
                  << p.result.lexical.size() << " labeled entities\n";
      }
    } else if (*merge_cmd) {
      std::vector<std::vector<ProjectedEdge>> edges;
      for (const auto& f : edge_files) edges.push_back(parse_edges_tsv(read_file(f)));
      const MappingSet mappings = merge_mappings.load();
      WeightedGraph g = merge(edges, mappings);
      write_file(graph_out, format_graph_tsv(g));
      if (!mappings_out.empty()) write_file(mappings_out, format_mappings(mappings));
      std::cerr << "[merge] " << g.vertex_count() << " vertices, " << g.edge_count()
                << " edges\n";
    } else if (*walk_cmd) {
      const WeightedGraph g = parse_graph_tsv(read_file(graph_in));
      std::vector<std::string> seeds;
      if (!seeds_file.empty()) {
        for (auto line : split_lines(read_file(seeds_file))) {
          if (!line.empty()) seeds.emplace_back(line);
        }
      } else if (!walk_mappings.files.empty()) {
        seeds = seed_iris(walk_mappings.load());
      } else {
        throw InputError("walk needs --mappings or --seeds");
      }
      walk_cfg.rng_seed = global.seed_or_default();
      WalkResult w = generate_walks(g, seeds, walk_cfg, global.workers);
      write_file(walks_out, format_walks(g, w.walks));
      std::cerr << "[walk] " << w.walks.size() << " walks, " << w.skipped_seeds
                << " seed(s) not in graph\n";
    } else if (*corpus_cmd) {
      corpus_cfg.rng_seed = global.seed_or_default();
      const auto walks = parse_sentences(read_file(walks_in));
      corpus_stage(walks, load_lexical_tables(to_paths(lex_files)), corpus_cfg, corpus_out);
    } else if (*train_cmd) {
      train_cfg.rng_seed = global.seed_or_default();
      train_cfg.workers = global.workers;
      const auto corpus = parse_sentences(read_file(corpus_in));
      TrainResult trained = train(corpus, train_cfg);
      write_file(embeddings_out, format_embeddings(trained.embeddings));
      if (!loss_out.empty()) {
        std::string loss;
        for (std::size_t e = 0; e < trained.epoch_loss.size(); ++e) {
          loss += std::to_string(e + 1) + '\t' + format_real(trained.epoch_loss[e]) + '\n';
        }
        write_file(loss_out, loss);
      }
      std::cerr << "[train] " << trained.embeddings.size() << " tokens x "
                << trained.embeddings.dim() << '\n';
    } else if (*rank_cmd || *eval_cmd) {
      const EmbeddingTable emb = parse_embeddings(read_file(emb_in));
      const LexicalTable lex = load_lexical_tables(to_paths(rank_lex));
      const auto pools = parse_pools(read_file(pools_in));
      if (*rank_cmd) {
        write_file(rank_out, format_ranked(pools, emb, lex));
      } else {
        RankingReport report = evaluate(pools, emb, lex);
        if (!report_out.empty()) write_file(report_out, report.to_tsv());
        std::cout << report.to_table();
      }
    } else if (*run_cmd) {
      PipelineConfig cfg = load_config(config_path);
      if (global.rng_seed) cfg.set_rng_seed(*global.rng_seed);
      if (!run_out.empty()) cfg.output_dir = run_out;
      if (app.get_option("--workers")->count()) cfg.set_workers(global.workers);
      RunSummary summary = run_pipeline(cfg);
      std::cerr << "[run] " << summary.walks << " walks, vocabulary " << summary.vocab << '\n';
      if (summary.report) std::cout << summary.report->to_table();
    }
  } catch (const StageError& e) {
    return report_error(e, e.exit_code());
  } catch (const InputError& e) {
    return report_error(e, kExitInput);
  } catch (const MalformedLine& e) {
    return report_error(e, kExitInput);
  } catch (const MappingError& e) {
    return report_error(e, kExitInput);
  } catch (const PoolError& e) {
    return report_error(e, kExitInput);
  } catch (const EmptyPool& e) {
    return report_error(e, kExitInput);
  } catch (const EmptyCorpus& e) {
    return report_error(e, kExitInput);
  } catch (const FileNotFound& e) {
    return report_error(e, kExitInput);
  } catch (const std::invalid_argument& e) {
    return report_error(e, kExitInput);
  } catch (const std::exception& e) {
    return report_error(e, kExitInternal);
  }
  return kExitOk;
}

}  // namespace owl2vec4oa::cli
