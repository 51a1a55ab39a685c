#include "toolkg/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "toolkg/error.hpp"
#include "toolkg/extraction.hpp"
#include "toolkg/pipeline.hpp"

namespace toolkg::cli {

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

struct ProviderOptions {
  std::string provider = "local";
  std::string generator = "template";
  std::string transcripts;
  bool strict_offline = false;
  bool record = false;
  std::uint64_t seed = kDefaultSeed;
  std::size_t dim = kDefaultEmbeddingDim;
};

void add_provider_options(CLI::App& cmd, ProviderOptions& p, bool with_generator, bool with_rankers) {
  cmd.add_option("--seed", p.seed, "Seed for local providers and sampling");
  if (with_rankers) {
    cmd.add_option("--provider", p.provider, "Embedder/reranker backend")
        ->check(CLI::IsMember({"local", "remote"}));
    cmd.add_option("--dim", p.dim, "Local embedding dimension")->check(CLI::Range(8, 1 << 16));
  }
  if (with_generator) {
    cmd.add_option("--generator", p.generator, "Structured-output generator")
        ->check(CLI::IsMember({"none", "template", "replay", "remote"}));
    cmd.add_option("--transcripts", p.transcripts, "Transcript cache (JSONL)");
    cmd.add_flag("--strict-offline", p.strict_offline, "Fail on uncached generator requests");
    cmd.add_flag("--record", p.record, "Record generator responses into --transcripts");
  }
}

struct Providers {
  std::unique_ptr<Embedder> embedder;
  std::unique_ptr<Reranker> reranker;
  TranscriptCache cache;
  std::unique_ptr<Generator> base;
  std::unique_ptr<Generator> recorder;

  Generator* generator() { return recorder ? recorder.get() : base.get(); }
};

Providers make_providers(const ProviderOptions& p) {
  Providers out;
  if (p.provider == "remote") {
    out.embedder = std::make_unique<RemoteEmbedder>(endpoint_from_env("PROVIDER_EMBED_URL"));
    out.reranker = std::make_unique<RemoteReranker>(endpoint_from_env("PROVIDER_RERANK_URL"));
  } else {
    out.embedder = std::make_unique<LocalEmbedder>(p.dim, p.seed);
    out.reranker = std::make_unique<LocalReranker>(p.dim, p.seed);
  }
  if (!p.transcripts.empty()) out.cache = TranscriptCache::load(p.transcripts);
  if (p.generator == "template") {
    out.base = std::make_unique<TemplateGenerator>(p.seed);
  } else if (p.generator == "replay") {
    out.base = std::make_unique<ReplayGenerator>(out.cache, p.strict_offline);
  } else if (p.generator == "remote") {
    out.base = std::make_unique<RemoteGenerator>(endpoint_from_env("PROVIDER_GEN_URL"));
  }
  if (p.record) {
    if (p.transcripts.empty()) throw Error(ErrorKind::Config, "cli", "--record needs --transcripts");
    if (!out.base) throw Error(ErrorKind::Config, "cli", "--record needs a generator");
    out.recorder = std::make_unique<RecordingGenerator>(*out.base, out.cache);
  }
  return out;
}

void finish_recording(Providers& providers, const ProviderOptions& p) {
  if (p.record) providers.cache.save(p.transcripts);
}

void write_file(const std::string& path, const std::string& content) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cli", "cannot write " + path);
  out << content;
}

std::vector<Method> parse_methods(const std::string& spec) {
  if (spec == "all") return {std::begin(kAllMethods), std::end(kAllMethods)};
  std::vector<Method> out;
  std::stringstream in(spec);
  std::string name;
  while (std::getline(in, name, ',')) {
    const auto m = parse_method(name);
    if (!m) throw CLI::ValidationError("--method", "unknown method '" + name + "'");
    out.push_back(*m);
  }
  return out;
}

std::vector<double> parse_taus(const std::string& spec) {
  std::vector<double> out;
  std::stringstream in(spec);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw CLI::ValidationError("--sweep-tau", "not a number: '" + item + "'");
    }
  }
  return out;
}

// Turns a JSON config into trailing flags so that it wins over the command
// line. Top-level scalars apply to whichever command has the option; an
// object named after the command applies to that command only.
std::vector<std::string> config_args(const std::string& path, const std::string& command) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cli", "cannot read config " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, "cli", path + ": " + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorKind::Config, "cli", path + ": expected a JSON object");
  std::vector<std::string> out;
  auto emit = [&](const std::string& key, const nlohmann::json& value) {
    if (value.is_boolean()) {
      out.push_back("--" + key + "=" + (value.get<bool>() ? "true" : "false"));
    } else if (value.is_string()) {
      out.push_back("--" + key + "=" + value.get<std::string>());
    } else if (value.is_number()) {
      out.push_back("--" + key + "=" + value.dump());
    } else {
      throw Error(ErrorKind::Config, "cli", path + ": unsupported value for '" + key + "'");
    }
  };
  for (const auto& [key, value] : doc.items()) {
    if (value.is_object()) continue;
    emit(key, value);
  }
  if (doc.contains(command) && doc[command].is_object()) {
    for (const auto& [key, value] : doc[command].items()) emit(key, value);
  }
  return out;
}

// ---- commands -------------------------------------------------------------

struct BuildArgs {
  std::string catalog;
  std::string out;
  std::string report;
  std::string ontology;
  std::string synonyms;
  ProviderOptions providers;
};

int build_graph_cmd(const BuildArgs& a, std::ostream& out) {
  const auto ontology = a.ontology.empty() ? Ontology::defaults() : Ontology::load(a.ontology);
  const auto table = a.synonyms.empty() ? SynonymTable::defaults() : SynonymTable::load(a.synonyms);
  const auto catalog = load_catalog(a.catalog, ontology);
  auto p = a.providers;
  auto providers = make_providers(p);
  auto built = build_graph(catalog, ontology, table, providers.generator());
  save_graph(built.graph, a.out);
  if (!a.report.empty()) write_file(a.report, built.report.to_json().dump(2) + "\n");
  finish_recording(providers, p);
  out << "graph " << built.graph.fingerprint() << ": " << built.graph.nodes().size() << " nodes, "
      << built.graph.edges().size() << " edges from " << catalog.tools.size() << " tools\n";
  for (const auto& note : built.report.notes) out << "note: " << note << "\n";
  return kOk;
}

struct RetrieveArgs {
  std::string catalog;
  std::string graph;
  std::string queries;
  std::string query;
  std::string out;
  std::string method = "eeg";
  std::string index_cache;
  std::string tokenizer = "word_boundary";
  std::string fields = "description_plus_title";
  std::string stopwords;
  std::size_t k = 10;
  std::size_t k_entry = 10;
  double min_entry_cosine = -2.0;
  ProviderOptions providers;
};

int retrieve_cmd(const RetrieveArgs& a, std::ostream& out) {
  const auto methods = parse_methods(a.method);
  const auto catalog = load_catalog(a.catalog);
  const auto graph = load_graph(a.graph);
  auto providers = make_providers(a.providers);

  RetrievalConfig config;
  config.k_final = a.k;
  config.k_entry_semantic = a.k_entry;
  if (a.min_entry_cosine > -2.0) config.min_entry_cosine = a.min_entry_cosine;
  Bm25Config bm25;
  bm25.tokenizer = *parse_tokenizer_mode(a.tokenizer);
  bm25.fields = *parse_field_mode(a.fields);
  NgramConfig ngram;
  if (!a.stopwords.empty()) ngram.stopwords = NgramConfig::load_stopwords(a.stopwords);

  std::optional<EmbeddingIndex> cached;
  if (!a.index_cache.empty() && std::filesystem::exists(a.index_cache)) {
    cached = load_embedding_index(a.index_cache);
  }
  const RetrievalEngine engine(catalog, graph, *providers.embedder, *providers.reranker, config,
                               bm25, ngram, cached);
  if (!a.index_cache.empty() && !cached) save_embedding_index(engine.node_index(), a.index_cache);

  std::vector<QueryInput> queries;
  if (!a.query.empty()) queries.push_back({"q1", a.query});
  if (!a.queries.empty()) {
    auto more = load_queries(a.queries);
    queries.insert(queries.end(), more.begin(), more.end());
  }
  if (queries.empty()) throw Error(ErrorKind::Config, "cli", "retrieve needs --query or --queries");
  const auto runs = run_queries(engine, queries, methods);
  if (a.out.empty()) {
    out << serialize_run_log(runs);
  } else {
    write_file(a.out, serialize_run_log(runs));
    out << runs.size() << " results for " << queries.size() << " queries written to " << a.out << "\n";
  }
  return kOk;
}

struct EvalArgs {
  std::string dataset;
  std::string runs;
  std::string out_dir = "report";
};

int eval_cmd(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  const auto dataset = load_dataset(a.dataset);
  const auto runs = load_run_log(a.runs);
  const auto cases = join_cases(dataset, runs);
  if (cases.empty()) throw Error(ErrorKind::Report, "eval", "no accepted records in " + a.dataset);
  const auto methods = methods_in(runs);
  if (methods.empty()) throw Error(ErrorKind::Report, "eval", "run log " + a.runs + " is empty");
  auto report = build_report(cases, methods);
  report.metadata["dataset"] = hex64(fnv1a64(serialize_dataset(dataset)));
  report.metadata["run_log"] = hex64(fnv1a64(serialize_run_log(runs)));
  write_file((std::filesystem::path(a.out_dir) / "report.csv").string(), report.to_csv());
  write_file((std::filesystem::path(a.out_dir) / "report.md").string(), report.to_markdown());
  out << report.to_markdown();
  const auto problems = report.check_invariants();
  for (const auto& p : problems) err << "eval: invariant violated: " << p << "\n";
  return problems.empty() ? kOk : kFailure;
}

struct GenArgs {
  std::string catalog;
  std::string out;
  std::string report;
  std::string sweep;
  std::string classes;
  double tau = kDefaultTau;
  double rp_floor = kOutputConfidenceFloor;
  std::size_t max_len = 3;
  std::size_t max_paths = 200;
  std::size_t per_class = 0;
  ProviderOptions providers;
};

int gen_queries_cmd(const GenArgs& a, std::ostream& out) {
  const auto catalog = load_catalog(a.catalog);
  auto providers = make_providers(a.providers);
  if (!a.sweep.empty()) {
    out << "tau,pp_edges,isolated_tools\n";
    for (double tau : parse_taus(a.sweep)) {
      const auto pp = build_pp_graph(catalog, *providers.embedder, tau);
      std::set<std::string> linked;
      for (const auto& e : pp.edges) {
        linked.insert(e.a);
        linked.insert(e.b);
      }
      out << tau << "," << pp.edges.size() << "," << pp.tools.size() - linked.size() << "\n";
    }
    return kOk;
  }
  if (!providers.generator()) throw Error(ErrorKind::Config, "cli", "gen-queries needs a generator");
  if (a.out.empty()) throw Error(ErrorKind::Config, "cli", "gen-queries needs --out");
  QueryGenConfig config;
  config.tau = a.tau;
  config.rp_floor = a.rp_floor;
  config.max_len = a.max_len;
  config.max_paths = a.max_paths;
  config.seed = a.providers.seed;
  if (!a.classes.empty()) {
    config.classes.clear();
    std::stringstream in(a.classes);
    std::string label;
    while (std::getline(in, label, ',')) {
      const auto c = parse_query_class(label);
      if (!c) throw CLI::ValidationError("--classes", "unknown class '" + label + "'");
      config.classes.insert(*c);
    }
  }
  if (a.per_class > 0) {
    for (auto c : kAllQueryClasses) config.class_targets[c] = a.per_class;
  }
  const auto dataset = generate_dataset(catalog, *providers.embedder, *providers.generator(), config);
  write_file(a.out, serialize_dataset(dataset.records));
  if (!a.report.empty()) write_file(a.report, dataset.report.dump(2) + "\n");
  finish_recording(providers, a.providers);
  out << dataset.records.size() << " queries written to " << a.out << "\n";
  return kOk;
}

struct InspectArgs {
  std::string graph;
  std::string node;
  std::string type;
};

int inspect_cmd(const InspectArgs& a, std::ostream& out) {
  const auto graph = load_graph(a.graph);
  std::optional<Node> center;
  if (graph.node(a.node)) {
    center = *graph.node(a.node);
  } else {
    const auto name = canonicalize_entity(a.node);
    center = a.type.empty() ? lookup_node(graph, name) : lookup_node(graph, name, a.type);
  }
  if (!center) throw Error(ErrorKind::NotFound, "kg", "no node named '" + a.node + "'");
  const auto ego = one_hop_ego(graph, center->id);
  out << center->id << "\n";
  out << "neighbors: " << ego.members.size() - 1 << "\n";
  for (const auto& e : ego.induced_edges) {
    if (e.source != center->id && e.target != center->id) continue;
    const bool outgoing = e.source == center->id;
    out << "  " << (outgoing ? "-[" : "<-[") << e.predicate << (outgoing ? "]-> " : "]- ")
        << (outgoing ? e.target : e.source) << "\n";
  }
  const auto tools = extract_tool_nodes(ego, graph);
  out << "tools: " << tools.size() << "\n";
  for (const auto& id : tools) {
    const auto* n = graph.node(id);
    const auto it = n->metadata.find(kToolIdKey);
    out << "  " << (it != n->metadata.end() ? it->second : id) << "  " << n->name << "\n";
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Knowledge-graph tool retrieval"};
  app.require_subcommand(1);
  // Lets --config follow the subcommand name.
  app.fallthrough();
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string config_path;
  app.add_option("--config", config_path, "JSON file whose values override flags");

  BuildArgs build;
  auto* build_cmd = app.add_subcommand("build-graph", "Catalog to graph snapshot");
  build_cmd->add_option("--catalog", build.catalog, "Tool catalog (JSONL)")->required();
  build_cmd->add_option("--out", build.out, "Graph snapshot path")->required();
  build_cmd->add_option("--report", build.report, "Build report (JSON)");
  build_cmd->add_option("--ontology", build.ontology, "Ontology file (JSON)");
  build_cmd->add_option("--synonyms", build.synonyms, "Synonym table (JSON)");
  add_provider_options(*build_cmd, build.providers, true, false);

  RetrieveArgs retrieve;
  auto* retrieve_cmd_app = app.add_subcommand("retrieve", "Run retrieval methods over queries");
  retrieve_cmd_app->add_option("--catalog", retrieve.catalog, "Tool catalog (JSONL)")->required();
  retrieve_cmd_app->add_option("--graph", retrieve.graph, "Graph snapshot")->required();
  retrieve_cmd_app->add_option("--queries", retrieve.queries, "Queries or dataset (JSONL)");
  retrieve_cmd_app->add_option("--query", retrieve.query, "Single query text");
  retrieve_cmd_app->add_option("--out", retrieve.out, "Run log path (stdout if omitted)");
  retrieve_cmd_app->add_option("--method", retrieve.method, "eeg, semantic, lexical, hybrid, all");
  retrieve_cmd_app->add_option("--index-cache", retrieve.index_cache, "Node embedding index cache");
  retrieve_cmd_app->add_option("--tokenizer", retrieve.tokenizer, "BM25 tokenizer")
      ->check(CLI::IsMember({"whitespace", "word_boundary", "regex", "lemma"}));
  retrieve_cmd_app->add_option("--fields", retrieve.fields, "BM25 fields")
      ->check(CLI::IsMember({"description_only", "description_plus_title"}));
  retrieve_cmd_app->add_option("--stopwords", retrieve.stopwords, "Stopword list for n-grams");
  retrieve_cmd_app->add_option("--k", retrieve.k, "Final list length")->check(CLI::PositiveNumber);
  retrieve_cmd_app->add_option("--k-entry", retrieve.k_entry, "Semantic entry nodes")
      ->check(CLI::PositiveNumber);
  retrieve_cmd_app->add_option("--min-entry-cosine", retrieve.min_entry_cosine,
                               "Drop semantic entry nodes below this cosine");
  add_provider_options(*retrieve_cmd_app, retrieve.providers, false, true);

  EvalArgs eval;
  auto* eval_cmd_app = app.add_subcommand("eval", "Score a run log against a dataset");
  eval_cmd_app->add_option("--dataset", eval.dataset, "Query dataset (JSONL)")->required();
  eval_cmd_app->add_option("--runs", eval.runs, "Run log (JSONL)")->required();
  eval_cmd_app->add_option("--out-dir", eval.out_dir, "Directory for report.csv and report.md");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-queries", "Generate a labeled query dataset");
  gen_cmd->add_option("--catalog", gen.catalog, "Tool catalog (JSONL)")->required();
  gen_cmd->add_option("--out", gen.out, "Dataset path");
  gen_cmd->add_option("--report", gen.report, "Generation report (JSON)");
  gen_cmd->add_option("--tau", gen.tau, "P-P similarity threshold")->check(CLI::Range(0.0, 1.0));
  gen_cmd->add_option("--rp-floor", gen.rp_floor, "Minimum output confidence for R-P edges")
      ->check(CLI::Range(0.0, 1.0));
  gen_cmd->add_option("--max-len", gen.max_len, "Longest chain")->check(CLI::Range(1, 4));
  gen_cmd->add_option("--max-paths", gen.max_paths, "Chains kept per kind (0 = all)");
  gen_cmd->add_option("--per-class", gen.per_class, "Accepted queries per class (0 = no cap)");
  gen_cmd->add_option("--classes", gen.classes, "Comma-separated classes to generate");
  gen_cmd->add_option("--sweep-tau", gen.sweep, "Report P-P edge counts for these taus and exit");
  add_provider_options(*gen_cmd, gen.providers, true, true);

  InspectArgs inspect;
  auto* inspect_app = app.add_subcommand("inspect", "Dump the 1-hop ego graph of a node");
  inspect_app->add_option("--graph", inspect.graph, "Graph snapshot")->required();
  inspect_app->add_option("--node", inspect.node, "Node id or name")->required();
  inspect_app->add_option("--type", inspect.type, "Node type when the name is ambiguous");

  std::vector<std::string> argv = args;
  try {
    // Pre-scan for --config so its values can be appended after the flags.
    for (std::size_t i = 0; i < argv.size(); ++i) {
      std::string path;
      if (argv[i] == "--config" && i + 1 < argv.size()) path = argv[i + 1];
      if (argv[i].starts_with("--config=")) path = argv[i].substr(9);
      if (path.empty()) continue;
      std::string command;
      for (const auto& a : argv) {
        if (app.get_subcommand_no_throw(a)) {
          command = a;
          break;
        }
      }
      const auto extra = config_args(path, command);
      argv.insert(argv.end(), extra.begin(), extra.end());
      break;
    }
    std::vector<std::string> reversed(argv.rbegin(), argv.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage: " << e.what() << "\n" << app.help();
    return kUsage;
  } catch (const Error& e) {
    err << e.module() << ": " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (build_cmd->parsed()) return build_graph_cmd(build, out);
    if (retrieve_cmd_app->parsed()) return retrieve_cmd(retrieve, out);
    if (eval_cmd_app->parsed()) return eval_cmd(eval, out, err);
    if (gen_cmd->parsed()) return gen_queries_cmd(gen, out);
    if (inspect_app->parsed()) return inspect_cmd(inspect, out);
  } catch (const CLI::ValidationError& e) {
    err << "usage: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << e.module() << ": " << e.what() << "\n";
    return kFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}

}  // namespace toolkg::cli
