#include "pipeline.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cstdio>
#include <iostream>
#include <set>
#include <sstream>

#include "owl2vec4oa/ntriples.hpp"
#include "owl2vec4oa/text_io.hpp"

namespace owl2vec4oa::cli {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::uint64_t parse_uint(std::string_view key, std::string_view v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw InputError("config: '" + std::string(key) + "' expects a non-negative integer, got '" +
                     std::string(v) + "'");
  }
  return out;
}

double parse_double(std::string_view key, std::string_view v) {
  double out = 0;
  if (!parse_real(v, out)) {
    throw InputError("config: '" + std::string(key) + "' expects a real, got '" + std::string(v) +
                     "'");
  }
  return out;
}

const char* rule_name(ConfidenceRule r) {
  switch (r) {
    case ConfidenceRule::Max: return "max";
    case ConfidenceRule::Min: return "min";
    case ConfidenceRule::Mean: return "mean";
  }
  return "max";
}

fs::path resolve(const fs::path& base, std::string_view v) {
  fs::path p{std::string(v)};
  if (p.is_relative() && !base.empty()) p = base / p;
  return p.lexically_normal();
}

}  // namespace

Combinator parse_combinator(std::string_view text) {
  if (text == "union") return Combinator::Union;
  if (text == "intersection") return Combinator::Intersection;
  throw InputError("combine must be 'union' or 'intersection', got '" + std::string(text) + "'");
}

ConfidenceRule parse_confidence_rule(std::string_view text) {
  if (text == "max") return ConfidenceRule::Max;
  if (text == "min") return ConfidenceRule::Min;
  if (text == "mean") return ConfidenceRule::Mean;
  throw InputError("confidence rule must be max, min or mean, got '" + std::string(text) + "'");
}

bool parse_bool(std::string_view text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw InputError("expected a boolean, got '" + std::string(text) + "'");
}

void PipelineConfig::set_rng_seed(std::uint64_t seed) {
  walk.rng_seed = seed;
  corpus.rng_seed = seed;
  train.rng_seed = seed;
}

void PipelineConfig::set_workers(unsigned n) {
  workers = n == 0 ? 1 : n;
  train.workers = workers;
}

void PipelineConfig::validate() const {
  if (ontologies.empty()) throw InputError("config: at least one 'onto' is required");
  auto require = [](const fs::path& p, const char* what) {
    if (!fs::is_regular_file(p)) {
      throw InputError(std::string(what) + " file not found: " + p.string());
    }
  };
  for (const auto& p : ontologies) require(p, "ontology");
  for (const auto& p : mappings) require(p, "mapping");
  if (pools) require(*pools, "candidate pool");
  try {
    walk.validate();
    train.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  if (!(corpus.replace_prob >= 0.0 && corpus.replace_prob <= 1.0)) {
    throw InputError("config: replace_prob must be in [0, 1]");
  }
}

PipelineConfig parse_config(std::string_view text, const fs::path& base_dir) {
  PipelineConfig cfg;
  bool custom_annotations = false;
  std::size_t row = 0;
  for (std::string_view raw : split_lines(text)) {
    ++row;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw InputError("config line " + std::to_string(row) + ": expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view v = trim(line.substr(eq + 1));

    if (key == "onto") {
      cfg.ontologies.push_back(resolve(base_dir, v));
    } else if (key == "mappings") {
      cfg.mappings.push_back(resolve(base_dir, v));
    } else if (key == "combine") {
      cfg.combine = parse_combinator(v);
    } else if (key == "union_rule") {
      cfg.union_rule = parse_confidence_rule(v);
    } else if (key == "intersection_rule") {
      cfg.intersection_rule = parse_confidence_rule(v);
    } else if (key == "annotation_prop") {
      if (!custom_annotations) cfg.projection.annotation_props.clear();
      custom_annotations = true;
      if (!is_valid_iri(v)) throw InputError("config: annotation_prop is not an IRI");
      cfg.projection.annotation_props.emplace_back(v);
    } else if (key == "inverse_subclass") {
      cfg.projection.inverse_subclass = parse_bool(v);
    } else if (key == "lenient") {
      cfg.lenient = parse_bool(v);
    } else if (key == "walk_depth") {
      cfg.walk.walk_depth = parse_uint(key, v);
    } else if (key == "iterations") {
      cfg.walk.iterations = parse_uint(key, v);
    } else if (key == "rng_seed") {
      cfg.set_rng_seed(parse_uint(key, v));
    } else if (key == "replace_prob") {
      cfg.corpus.replace_prob = parse_double(key, v);
    } else if (key == "sample_all_labels") {
      cfg.corpus.sample_all_labels = parse_bool(v);
    } else if (key == "dim") {
      cfg.train.dim = parse_uint(key, v);
    } else if (key == "epochs") {
      cfg.train.epochs = parse_uint(key, v);
    } else if (key == "window") {
      cfg.train.window = parse_uint(key, v);
    } else if (key == "negatives") {
      cfg.train.negatives = parse_uint(key, v);
    } else if (key == "initial_lr") {
      cfg.train.initial_lr = parse_double(key, v);
    } else if (key == "final_lr") {
      cfg.train.final_lr = parse_double(key, v);
    } else if (key == "min_count") {
      cfg.train.min_count = parse_uint(key, v);
    } else if (key == "unigram_power") {
      cfg.train.unigram_power = parse_double(key, v);
    } else if (key == "subsample") {
      cfg.train.subsample = parse_double(key, v);
    } else if (key == "pools") {
      cfg.pools = resolve(base_dir, v);
    } else if (key == "output_dir") {
      cfg.output_dir = resolve(base_dir, v);
    } else if (key == "workers") {
      cfg.set_workers(static_cast<unsigned>(parse_uint(key, v)));
    } else if (key == "digest") {
      // Informational; written by format_manifest.
    } else {
      throw InputError("config line " + std::to_string(row) + ": unknown key '" + key + "'");
    }
  }
  return cfg;
}

PipelineConfig load_config(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw InputError("config file not found: " + path.string());
  return parse_config(read_file(path), path.parent_path());
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

std::string format_manifest(const PipelineConfig& cfg) {
  std::ostringstream out;
  auto abs = [](const fs::path& p) { return fs::absolute(p).lexically_normal().string(); };
  out << "# owl2vec4oa run manifest; loadable with `owl2vec4oa run --config`\n";
  for (const auto& p : cfg.ontologies) out << "onto = " << abs(p) << '\n';
  for (const auto& p : cfg.mappings) out << "mappings = " << abs(p) << '\n';
  out << "combine = " << (cfg.combine == Combinator::Union ? "union" : "intersection") << '\n'
      << "union_rule = " << rule_name(cfg.union_rule) << '\n'
      << "intersection_rule = " << rule_name(cfg.intersection_rule) << '\n';
  for (const auto& a : cfg.projection.annotation_props) out << "annotation_prop = " << a << '\n';
  out << "inverse_subclass = " << (cfg.projection.inverse_subclass ? "true" : "false") << '\n'
      << "lenient = " << (cfg.lenient ? "true" : "false") << '\n'
      << "walk_depth = " << cfg.walk.walk_depth << '\n'
      << "iterations = " << cfg.walk.iterations << '\n'
      << "rng_seed = " << cfg.walk.rng_seed << '\n'
      << "replace_prob = " << format_real(cfg.corpus.replace_prob) << '\n'
      << "sample_all_labels = " << (cfg.corpus.sample_all_labels ? "true" : "false") << '\n'
      << "dim = " << cfg.train.dim << '\n'
      << "epochs = " << cfg.train.epochs << '\n'
      << "window = " << cfg.train.window << '\n'
      << "negatives = " << cfg.train.negatives << '\n'
      << "initial_lr = " << format_real(cfg.train.initial_lr) << '\n'
      << "final_lr = " << format_real(cfg.train.final_lr) << '\n'
      << "min_count = " << cfg.train.min_count << '\n'
      << "unigram_power = " << format_real(cfg.train.unigram_power) << '\n'
      << "subsample = " << format_real(cfg.train.subsample) << '\n';
  if (cfg.pools) out << "pools = " << abs(*cfg.pools) << '\n';
  out << "output_dir = " << abs(cfg.output_dir) << '\n'
      << "workers = " << cfg.workers << '\n';

  auto digest = [&](const fs::path& p) {
    out << "digest = " << sha256_hex(read_file(p)) << ' ' << abs(p) << '\n';
  };
  for (const auto& p : cfg.ontologies) digest(p);
  for (const auto& p : cfg.mappings) digest(p);
  if (cfg.pools) digest(*cfg.pools);
  return out.str();
}

std::vector<ProjectedOntology> project_stage(const std::vector<fs::path>& ontologies,
                                             const ProjectionOptions& options, bool lenient,
                                             unsigned workers, const fs::path& out_dir) {
  std::vector<ProjectedOntology> projected;
  std::set<std::string> names;
  for (const auto& path : ontologies) {
    ProjectedOntology p;
    p.name = path.stem().string();
    if (!names.insert(p.name).second) {
      throw InputError("two ontologies share the output name '" + p.name + "'");
    }
    ParseResult parsed;
    try {
      parsed = parse_document(read_file(path), ParseOptions{lenient, workers});
    } catch (const MalformedLine& e) {
      throw InputError(path.string() + ": " + e.what());
    }
    if (parsed.skipped_lines) {
      std::cerr << "[project] " << path.string() << ": skipped " << parsed.skipped_lines
                << " malformed line(s)\n";
    }
    p.result = project(parsed.triples, options);
    projected.push_back(std::move(p));
  }
  for (const auto& p : projected) {
    write_file(out_dir / (p.name + ".edges.tsv"), format_edges_tsv(p.result.edges));
    write_file(out_dir / (p.name + ".lex.tsv"), format_lexical_tsv(p.result.lexical));
    write_file(out_dir / (p.name + ".report.txt"), p.result.report.to_text());
  }
  return projected;
}

MappingSet combine_mappings(const std::vector<fs::path>& paths, Combinator combine,
                            ConfidenceRule union_rule, ConfidenceRule intersection_rule) {
  MappingSet combined;
  for (std::size_t i = 0; i < paths.size(); ++i) {
    MappingSet next = load_mappings(paths[i]);
    if (i == 0) {
      combined = std::move(next);
    } else if (combine == Combinator::Union) {
      combined = set_union(combined, next, union_rule);
    } else {
      combined = set_intersection(combined, next, intersection_rule);
    }
  }
  return combined;
}

std::vector<std::string> seed_iris(const MappingSet& mappings) {
  std::vector<std::string> seeds;
  for (const auto& iri : seed_entities(mappings)) seeds.push_back(iri.str());
  return seeds;
}

Documents corpus_stage(const std::vector<Sentence>& walks, const LexicalTable& lex,
                       const CorpusConfig& cfg, const fs::path& out_dir) {
  Documents docs = build_documents(walks, lex, cfg);
  write_file(out_dir / artifacts::kStructure, format_sentences(docs.structure));
  write_file(out_dir / artifacts::kLexical, format_sentences(docs.lexical));
  write_file(out_dir / artifacts::kCombined, format_sentences(docs.combined));
  write_file(out_dir / artifacts::kCorpus, format_sentences(docs.merged()));
  if (docs.full_iri_fallbacks) {
    std::cerr << "[corpus] " << docs.full_iri_fallbacks
              << " IRI occurrence(s) had no lexical form and were kept verbatim\n";
  }
  return docs;
}

std::string format_ranked(std::span<const CandidatePool> pools, const EmbeddingTable& emb,
                          const LexicalTable& lex) {
  std::string out = "SrcEntity\tRank\tCandidate\tScore\n";
  for (const auto& pool : pools) {
    auto ranked = rank_candidates(pool, emb, lex);
    for (std::size_t i = 0; i < ranked.size(); ++i) {
      out += pool.source + '\t' + std::to_string(i + 1) + '\t' + ranked[i].first + '\t' +
             format_real(ranked[i].second) + '\n';
    }
  }
  return out;
}

LexicalTable load_lexical_tables(const std::vector<fs::path>& paths) {
  LexicalTable lex;
  for (const auto& p : paths) lex.merge(parse_lexical_tsv(read_file(p)));
  return lex;
}

namespace {

bool is_input_error(const std::exception& e) {
  return dynamic_cast<const InputError*>(&e) || dynamic_cast<const MalformedLine*>(&e) ||
         dynamic_cast<const MappingError*>(&e) || dynamic_cast<const PoolError*>(&e) ||
         dynamic_cast<const EmptyPool*>(&e) || dynamic_cast<const EmptyCorpus*>(&e) ||
         dynamic_cast<const std::invalid_argument*>(&e) || dynamic_cast<const FileNotFound*>(&e);
}

template <class Fn>
auto stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw StageError(name, e.what(), is_input_error(e) ? kExitInput : kExitInternal);
  }
}

}  // namespace

RunSummary run_pipeline(const PipelineConfig& cfg) {
  cfg.validate();
  const fs::path& out = cfg.output_dir;
  fs::create_directories(out);
  write_file(out / artifacts::kManifest, format_manifest(cfg));

  RunSummary summary;
  auto projected = stage("project", [&] {
    return project_stage(cfg.ontologies, cfg.projection, cfg.lenient, cfg.workers,
                         out / artifacts::kProjectionDir);
  });

  const MappingSet mappings = stage("merge", [&] {
    return combine_mappings(cfg.mappings, cfg.combine, cfg.union_rule, cfg.intersection_rule);
  });
  const WeightedGraph graph = stage("merge", [&] {
    std::vector<std::vector<ProjectedEdge>> edges;
    for (const auto& p : projected) edges.push_back(p.result.edges);
    WeightedGraph g = merge(edges, mappings);
    write_file(out / artifacts::kMappings, format_mappings(mappings));
    write_file(out / artifacts::kGraph, format_graph_tsv(g));
    return g;
  });

  const std::vector<Sentence> walks = stage("walk", [&] {
    const auto seeds = seed_iris(mappings);
    WalkResult w = generate_walks(graph, seeds, cfg.walk, cfg.workers);
    summary.walks = w.walks.size();
    summary.skipped_seeds = w.skipped_seeds;
    write_file(out / artifacts::kWalks, format_walks(graph, w.walks));
    std::vector<Sentence> sentences;
    sentences.reserve(w.walks.size());
    for (const auto& walk : w.walks) sentences.push_back(walk_iris(graph, walk));
    return sentences;
  });

  LexicalTable lex;
  for (const auto& p : projected) lex.merge(p.result.lexical);
  const Documents docs = stage("corpus", [&] { return corpus_stage(walks, lex, cfg.corpus, out); });

  const EmbeddingTable embeddings = stage("train", [&] {
    TrainResult trained = train(docs.merged(), cfg.train);
    std::string text = format_embeddings(trained.embeddings);
    write_file(out / artifacts::kEmbeddings, text);
    std::string loss;
    for (std::size_t e = 0; e < trained.epoch_loss.size(); ++e) {
      loss += std::to_string(e + 1) + '\t' + format_real(trained.epoch_loss[e]) + '\n';
    }
    write_file(out / artifacts::kLoss, loss);
    // Ranking reads the persisted table, exactly as the `eval` subcommand does.
    return parse_embeddings(text);
  });
  summary.vocab = embeddings.size();

  if (cfg.pools) {
    summary.report = stage("eval", [&] {
      const auto pools = parse_pools(read_file(*cfg.pools));
      RankingReport report = evaluate(pools, embeddings, lex);
      write_file(out / artifacts::kRanked, format_ranked(pools, embeddings, lex));
      write_file(out / artifacts::kReportTsv, report.to_tsv());
      write_file(out / artifacts::kReportTable, report.to_table());
      return report;
    });
  }
  return summary;
}

}  // namespace owl2vec4oa::cli
