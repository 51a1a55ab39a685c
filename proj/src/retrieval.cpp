#include "toolkg/retrieval.hpp"

#include <algorithm>
#include <set>

#include <json.hpp>

#include "toolkg/error.hpp"
#include "toolkg/extraction.hpp"

namespace toolkg {
namespace {

std::vector<ScoredId> truncate(std::vector<ScoredId> list, std::size_t k) {
  if (list.size() > k) list.resize(k);
  return list;
}

std::string node_tool_document(const Node& node) {
  auto get = [&](const char* key) -> std::string {
    auto it = node.metadata.find(key);
    return it == node.metadata.end() ? std::string() : it->second;
  };
  ToolSpec spec;
  spec.title = get(kTitleKey);
  if (spec.title.empty()) spec.title = node.name;
  spec.description = get(kDescriptionKey);
  return tool_document(spec);
}

}  // namespace

const char* to_string(Method method) {
  switch (method) {
    case Method::Lexical: return "lexical";
    case Method::Semantic: return "semantic";
    case Method::Hybrid: return "hybrid";
    case Method::Eeg: return "eeg";
  }
  return "eeg";
}

std::optional<Method> parse_method(std::string_view name) {
  for (auto m : kAllMethods) {
    if (name == to_string(m)) return m;
  }
  if (name == "graph") return Method::Eeg;
  return std::nullopt;
}

void RetrievalConfig::validate() const {
  if (k_final < 1) throw Error(ErrorKind::Config, "retrieval", "k_final must be >= 1");
  if (k_entry_semantic < 1) {
    throw Error(ErrorKind::Config, "retrieval", "k_entry_semantic must be >= 1");
  }
  if (hybrid_component_k < 1) {
    throw Error(ErrorKind::Config, "retrieval", "hybrid_component_k must be >= 1");
  }
}

nlohmann::json to_json(const RetrievalResult& result) {
  auto scored = [](const std::vector<ScoredId>& list, const char* id_key) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& s : list) out.push_back({{id_key, s.id}, {"score", s.score}});
    return out;
  };
  const auto& d = result.diagnostics;
  return {{"query", result.query},
          {"method", to_string(result.method)},
          {"ranked_tools", scored(result.ranked_tools, "tool_id")},
          {"diagnostics",
           {{"semantic_entry_nodes", scored(d.semantic_entry_nodes, "node_id")},
            {"textual_entry_nodes", d.textual_entry_nodes},
            {"candidate_count", d.candidate_count},
            {"no_entry_points", d.no_entry_points},
            {"reranker", d.reranker}}}};
}

RetrievalResult retrieval_from_json(const nlohmann::json& record) {
  RetrievalResult r;
  r.query = record.at("query").get<std::string>();
  const auto method = parse_method(record.at("method").get<std::string>());
  if (!method) {
    throw Error(ErrorKind::Parse, "retrieval",
                "unknown method '" + record.at("method").get<std::string>() + "'");
  }
  r.method = *method;
  for (const auto& t : record.at("ranked_tools")) {
    r.ranked_tools.push_back({t.at("tool_id").get<std::string>(), t.at("score").get<double>()});
  }
  if (auto it = record.find("diagnostics"); it != record.end()) {
    auto& d = r.diagnostics;
    for (const auto& n : it->value("semantic_entry_nodes", nlohmann::json::array())) {
      d.semantic_entry_nodes.push_back({n.at("node_id").get<std::string>(), n.at("score").get<double>()});
    }
    d.textual_entry_nodes =
        it->value("textual_entry_nodes", std::vector<std::string>{});
    d.candidate_count = it->value("candidate_count", std::size_t{0});
    d.no_entry_points = it->value("no_entry_points", false);
    d.reranker = it->value("reranker", std::string());
  }
  return r;
}

ToolCorpus::ToolCorpus(const Catalog& catalog) {
  for (const auto& t : catalog.tools) texts_[t.tool_id] = tool_document(t);
}

const std::string& ToolCorpus::text(const std::string& tool_id) const {
  auto it = texts_.find(tool_id);
  if (it == texts_.end()) {
    throw Error(ErrorKind::Config, "retrieval", "tool '" + tool_id + "' is not in the catalog");
  }
  return it->second;
}

std::vector<ScoredId> rerank_candidates(std::string_view query,
                                        std::span<const RerankCandidate> candidates,
                                        Reranker& reranker, std::size_t k) {
  if (candidates.empty()) return {};
  const auto scores = reranker.rerank(query, candidates);
  std::multiset<std::string> expected, got;
  for (const auto& c : candidates) expected.insert(c.id);
  for (const auto& s : scores) got.insert(s.candidate_ref);
  if (expected != got) {
    throw Error(ErrorKind::ProviderContract, "retrieval",
                "reranker output is not a permutation of its " + std::to_string(candidates.size()) +
                    " candidates");
  }
  std::vector<ScoredId> ranked;
  for (const auto& s : scores) {
    if (ranked.size() == k) break;
    ranked.push_back({s.candidate_ref, s.score});
  }
  return ranked;
}

EegRetriever::EegRetriever(const KnowledgeGraph& graph, const EmbeddingIndex& node_index,
                           const NgramIndex& ngram_index, Reranker& reranker,
                           RetrievalConfig config)
    : graph_(graph),
      node_index_(node_index),
      ngram_index_(ngram_index),
      reranker_(reranker),
      config_(config) {
  config_.validate();
  const auto fp = graph.fingerprint();
  if (node_index.source_fingerprint != fp) {
    throw Error(ErrorKind::Config, "retrieval",
                "embedding index was built for graph " + node_index.source_fingerprint +
                    ", not for graph " + fp);
  }
  if (ngram_index.source_fingerprint != fp) {
    throw Error(ErrorKind::Config, "retrieval",
                "n-gram index was built for graph " + ngram_index.source_fingerprint +
                    ", not for graph " + fp);
  }
}

std::vector<std::string> EegRetriever::entry_nodes(std::string_view query,
                                                   const Embedding& query_vec,
                                                   RetrievalDiagnostics* diagnostics) const {
  const auto semantic =
      top_k_semantic(node_index_, query_vec, config_.k_entry_semantic, config_.min_entry_cosine);
  const auto textual = match_ngrams(ngram_index_, query);
  std::set<std::string> entries(textual.begin(), textual.end());
  for (const auto& s : semantic) entries.insert(s.id);
  if (diagnostics) {
    diagnostics->semantic_entry_nodes = semantic;
    diagnostics->textual_entry_nodes.assign(textual.begin(), textual.end());
  }
  return {entries.begin(), entries.end()};
}

std::vector<std::string> EegRetriever::candidate_tools(const std::vector<std::string>& entry_nodes) const {
  std::set<std::string> tools;
  for (const auto& id : entry_nodes) {
    for (const auto& tool_node : extract_tool_nodes(one_hop_ego(graph_, id), graph_)) {
      tools.insert(tool_node);
    }
  }
  return {tools.begin(), tools.end()};
}

RetrievalResult EegRetriever::retrieve(std::string_view query, const Embedding& query_vec) const {
  RetrievalResult result;
  result.query = std::string(query);
  result.method = Method::Eeg;
  auto& diag = result.diagnostics;
  diag.reranker = reranker_.fingerprint();

  const auto entries = entry_nodes(query, query_vec, &diag);
  if (entries.empty()) {
    diag.no_entry_points = true;
    return result;
  }
  std::vector<RerankCandidate> candidates;
  std::set<std::string> seen;
  for (const auto& node_id : candidate_tools(entries)) {
    const Node* node = graph_.node(node_id);
    auto it = node->metadata.find(kToolIdKey);
    if (it == node->metadata.end()) continue;
    if (!seen.insert(it->second).second) continue;
    candidates.push_back({it->second, node_tool_document(*node)});
  }
  diag.candidate_count = candidates.size();
  result.ranked_tools = rerank_candidates(query, candidates, reranker_, config_.k_final);
  return result;
}

RetrievalResult retrieve_eeg(std::string_view query, const Embedding& query_vec,
                             const KnowledgeGraph& graph, const EmbeddingIndex& node_index,
                             const NgramIndex& ngram_index, Reranker& reranker,
                             const RetrievalConfig& config) {
  return EegRetriever(graph, node_index, ngram_index, reranker, config).retrieve(query, query_vec);
}

RetrievalResult retrieve_semantic(std::string_view query, const Embedding& query_vec,
                                  const EmbeddingIndex& tool_index, const RetrievalConfig& config) {
  config.validate();
  RetrievalResult result;
  result.query = std::string(query);
  result.method = Method::Semantic;
  result.ranked_tools = top_k_semantic(tool_index, query_vec, config.k_final);
  result.diagnostics.candidate_count = tool_index.entries.size();
  return result;
}

RetrievalResult retrieve_lexical(std::string_view query, const Bm25Index& index,
                                 const RetrievalConfig& config) {
  config.validate();
  RetrievalResult result;
  result.query = std::string(query);
  result.method = Method::Lexical;
  auto scored = index.search(query);
  result.diagnostics.candidate_count = scored.size();
  result.ranked_tools = truncate(std::move(scored), config.k_final);
  return result;
}

RetrievalResult retrieve_hybrid(std::string_view query, const RetrievalResult& semantic,
                                const RetrievalResult& lexical, const ToolCorpus& corpus,
                                Reranker& reranker, const RetrievalConfig& config) {
  config.validate();
  RetrievalResult result;
  result.query = std::string(query);
  result.method = Method::Hybrid;
  result.diagnostics.reranker = reranker.fingerprint();
  std::vector<RerankCandidate> candidates;
  std::set<std::string> seen;
  for (const auto* list : {&semantic.ranked_tools, &lexical.ranked_tools}) {
    for (const auto& s : *list) {
      if (seen.insert(s.id).second) candidates.push_back({s.id, corpus.text(s.id)});
    }
  }
  result.diagnostics.candidate_count = candidates.size();
  result.ranked_tools = rerank_candidates(query, candidates, reranker, config.k_final);
  return result;
}

}  // namespace toolkg
