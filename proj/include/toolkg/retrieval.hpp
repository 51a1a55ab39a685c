#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "toolkg/catalog.hpp"
#include "toolkg/index.hpp"
#include "toolkg/kg.hpp"
#include "toolkg/providers.hpp"

namespace toolkg {

enum class Method { Lexical, Semantic, Hybrid, Eeg };

const char* to_string(Method method);
std::optional<Method> parse_method(std::string_view name);
// Report column order.
inline constexpr Method kAllMethods[] = {Method::Lexical, Method::Semantic, Method::Hybrid,
                                         Method::Eeg};

struct RetrievalConfig {
  std::size_t k_final = 10;
  std::size_t k_entry_semantic = 10;
  // Size of each sub-list fused by the hybrid method.
  std::size_t hybrid_component_k = 10;
  std::optional<double> min_entry_cosine;

  void validate() const;
};

struct RetrievalDiagnostics {
  std::vector<ScoredId> semantic_entry_nodes;
  std::vector<std::string> textual_entry_nodes;
  std::size_t candidate_count = 0;
  bool no_entry_points = false;
  std::string reranker;  // fingerprint of the reranker used, if any
};

struct RetrievalResult {
  std::string query;
  Method method = Method::Eeg;
  std::vector<ScoredId> ranked_tools;  // tool_id, score; non-increasing
  RetrievalDiagnostics diagnostics;
};

nlohmann::json to_json(const RetrievalResult& result);
RetrievalResult retrieval_from_json(const nlohmann::json& record);

// tool_id -> title + description
class ToolCorpus {
 public:
  ToolCorpus() = default;
  explicit ToolCorpus(const Catalog& catalog);
  const std::string& text(const std::string& tool_id) const;
  bool contains(const std::string& tool_id) const { return texts_.contains(tool_id); }

 private:
  std::map<std::string, std::string> texts_;
};

// Provider rerank order truncated to k. The provider must return a
// permutation of the candidate ids.
std::vector<ScoredId> rerank_candidates(std::string_view query,
                                        std::span<const RerankCandidate> candidates,
                                        Reranker& reranker, std::size_t k);

// Ensemble of 1-hop ego graphs. Index fingerprints are checked against the
// graph once, on construction.
class EegRetriever {
 public:
  EegRetriever(const KnowledgeGraph& graph, const EmbeddingIndex& node_index,
               const NgramIndex& ngram_index, Reranker& reranker, RetrievalConfig config);

  RetrievalResult retrieve(std::string_view query, const Embedding& query_vec) const;
  // Entry nodes and tool candidates without the rerank step.
  std::vector<std::string> entry_nodes(std::string_view query, const Embedding& query_vec,
                                       RetrievalDiagnostics* diagnostics = nullptr) const;
  std::vector<std::string> candidate_tools(const std::vector<std::string>& entry_nodes) const;

 private:
  const KnowledgeGraph& graph_;
  const EmbeddingIndex& node_index_;
  const NgramIndex& ngram_index_;
  Reranker& reranker_;
  RetrievalConfig config_;
};

RetrievalResult retrieve_eeg(std::string_view query, const Embedding& query_vec,
                             const KnowledgeGraph& graph, const EmbeddingIndex& node_index,
                             const NgramIndex& ngram_index, Reranker& reranker,
                             const RetrievalConfig& config);

RetrievalResult retrieve_semantic(std::string_view query, const Embedding& query_vec,
                                  const EmbeddingIndex& tool_index, const RetrievalConfig& config);

RetrievalResult retrieve_lexical(std::string_view query, const Bm25Index& index,
                                 const RetrievalConfig& config);

// Union of the two component lists, reranked.
RetrievalResult retrieve_hybrid(std::string_view query, const RetrievalResult& semantic,
                                const RetrievalResult& lexical, const ToolCorpus& corpus,
                                Reranker& reranker, const RetrievalConfig& config);

}  // namespace toolkg
