#include "toolkg/pipeline.hpp"

#include <fstream>

#include "toolkg/error.hpp"
#include "toolkg/extraction.hpp"
#include "toolkg/synthetic.hpp"

namespace toolkg {

RetrievalEngine::RetrievalEngine(const Catalog& catalog, const KnowledgeGraph& graph,
                                 Embedder& embedder, Reranker& reranker, RetrievalConfig config,
                                 Bm25Config bm25, NgramConfig ngram,
                                 std::optional<EmbeddingIndex> node_index)
    : embedder_(embedder),
      reranker_(reranker),
      config_(config),
      corpus_(catalog),
      node_index_(node_index ? std::move(*node_index) : build_embedding_index(graph, embedder)),
      tool_index_(build_tool_index(catalog, embedder)),
      ngram_index_(build_ngram_index(graph, std::move(ngram))),
      bm25_(build_bm25_index(catalog, bm25)) {
  config_.validate();
  if (node_index_.provider_fingerprint != embedder.fingerprint()) {
    throw Error(ErrorKind::Config, "retrieval",
                "embedding index was built with " + node_index_.provider_fingerprint +
                    ", current embedder is " + embedder.fingerprint());
  }
  eeg_ = std::make_unique<EegRetriever>(graph, node_index_, ngram_index_, reranker_, config_);
}

std::vector<RetrievalResult> RetrievalEngine::run(std::string_view query,
                                                  std::span<const Method> methods) const {
  std::optional<Embedding> vec;
  auto embedding = [&]() -> const Embedding& {
    if (!vec) vec = embedder_.embed_one(std::string(query));
    return *vec;
  };
  RetrievalConfig component = config_;
  component.k_final = config_.hybrid_component_k;
  std::vector<RetrievalResult> out;
  for (auto m : methods) {
    switch (m) {
      case Method::Lexical: out.push_back(retrieve_lexical(query, bm25_, config_)); break;
      case Method::Semantic:
        out.push_back(retrieve_semantic(query, embedding(), tool_index_, config_));
        break;
      case Method::Hybrid: {
        const auto sem = retrieve_semantic(query, embedding(), tool_index_, component);
        const auto lex = retrieve_lexical(query, bm25_, component);
        out.push_back(retrieve_hybrid(query, sem, lex, corpus_, reranker_, config_));
        break;
      }
      case Method::Eeg: out.push_back(eeg_->retrieve(query, embedding())); break;
    }
  }
  return out;
}

std::vector<QueryInput> load_queries(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "retrieval", "cannot read " + path);
  std::vector<QueryInput> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    try {
      const auto doc = nlohmann::json::parse(line);
      QueryInput q;
      q.query = doc.at("query").get<std::string>();
      q.id = doc.value("id", "q" + std::to_string(out.size() + 1));
      out.push_back(std::move(q));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Parse, "retrieval",
                  path + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<QueryInput> queries_from_dataset(std::span<const QueryRecord> records) {
  std::vector<QueryInput> out;
  for (const auto& r : records) {
    if (r.accepted()) out.push_back({r.id, r.query});
  }
  return out;
}

std::vector<RunRecord> run_queries(const RetrievalEngine& engine, std::span<const QueryInput> queries,
                                   std::span<const Method> methods) {
  std::vector<RunRecord> out;
  for (const auto& q : queries) {
    for (auto& result : engine.run(q.query, methods)) out.push_back({q.id, std::move(result)});
  }
  return out;
}

BenchmarkResult run_synthetic_benchmark(std::uint64_t seed) {
  BenchmarkResult bench;
  bench.catalog = make_synthetic_catalog(seed);
  LocalEmbedder embedder;
  LocalReranker reranker;
  TemplateGenerator generator(seed);
  auto built = build_graph(bench.catalog, Ontology::defaults(), SynonymTable::defaults(), &generator);
  bench.graph = std::move(built.graph);
  bench.dataset = generate_dataset(bench.catalog, embedder, generator, synthetic_benchmark_config(seed));
  const RetrievalEngine engine(bench.catalog, bench.graph, embedder, reranker);
  const auto queries = queries_from_dataset(bench.dataset.records);
  bench.runs = run_queries(engine, queries, kAllMethods);
  const auto cases = join_cases(bench.dataset.records, bench.runs);
  bench.report = build_report(cases, kAllMethods);
  return bench;
}

}  // namespace toolkg
