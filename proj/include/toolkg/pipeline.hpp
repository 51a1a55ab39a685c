#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "toolkg/catalog.hpp"
#include "toolkg/eval.hpp"
#include "toolkg/index.hpp"
#include "toolkg/kg.hpp"
#include "toolkg/providers.hpp"
#include "toolkg/querygen.hpp"
#include "toolkg/retrieval.hpp"

namespace toolkg {

// Indexes for all four methods over one catalog + graph pair.
class RetrievalEngine {
 public:
  // `node_index` lets a cached graph index stand in for a fresh one; it is
  // checked against the graph fingerprint.
  RetrievalEngine(const Catalog& catalog, const KnowledgeGraph& graph, Embedder& embedder,
                  Reranker& reranker, RetrievalConfig config = {}, Bm25Config bm25 = {},
                  NgramConfig ngram = {}, std::optional<EmbeddingIndex> node_index = std::nullopt);

  // One embedding of the query feeds every method.
  std::vector<RetrievalResult> run(std::string_view query, std::span<const Method> methods) const;

  const EmbeddingIndex& node_index() const { return node_index_; }
  const EmbeddingIndex& tool_index() const { return tool_index_; }
  const NgramIndex& ngram_index() const { return ngram_index_; }
  const Bm25Index& bm25_index() const { return bm25_; }
  const EegRetriever& eeg() const { return *eeg_; }

 private:
  Embedder& embedder_;
  Reranker& reranker_;
  RetrievalConfig config_;
  ToolCorpus corpus_;
  EmbeddingIndex node_index_;
  EmbeddingIndex tool_index_;
  NgramIndex ngram_index_;
  Bm25Index bm25_;
  std::unique_ptr<EegRetriever> eeg_;
};

struct QueryInput {
  std::string id;
  std::string query;
};

// Reads JSONL with "query" and optional "id" (dataset files qualify).
std::vector<QueryInput> load_queries(const std::string& path);
std::vector<QueryInput> queries_from_dataset(std::span<const QueryRecord> records);

std::vector<RunRecord> run_queries(const RetrievalEngine& engine, std::span<const QueryInput> queries,
                                   std::span<const Method> methods);

struct BenchmarkResult {
  Catalog catalog;
  KnowledgeGraph graph;
  Dataset dataset;
  std::vector<RunRecord> runs;
  EvalReport report;
};

// Synthetic catalog -> graph -> queries -> all four methods -> report, with
// local providers and the template generator.
BenchmarkResult run_synthetic_benchmark(std::uint64_t seed = kDefaultSeed);

}  // namespace toolkg
