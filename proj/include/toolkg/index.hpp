#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "toolkg/catalog.hpp"
#include "toolkg/kg.hpp"
#include "toolkg/providers.hpp"
#include "toolkg/text.hpp"

namespace toolkg {

struct ScoredId {
  std::string id;
  double score = 0.0;

  bool operator==(const ScoredId&) const = default;
};

// ---- dense ----------------------------------------------------------------

struct EmbeddingEntry {
  std::string id;
  Embedding embedding;
  std::string text;
};

struct EmbeddingIndex {
  std::vector<EmbeddingEntry> entries;  // sorted by id
  std::size_t dim = 0;
  std::string provider_fingerprint;
  std::string source_fingerprint;  // graph or catalog the entries came from

  // Identifies provider + source; equal fingerprints mean interchangeable
  // indexes.
  std::string fingerprint() const;
};

// name + type, plus the description for tool nodes.
std::string node_index_text(const Node& node);

EmbeddingIndex build_embedding_index(const KnowledgeGraph& graph, Embedder& embedder,
                                     std::size_t batch_size = 64);
// One entry per tool, keyed by tool_id, embedding the tool document.
EmbeddingIndex build_tool_index(const Catalog& catalog, Embedder& embedder,
                                std::size_t batch_size = 64);

std::string catalog_fingerprint(const Catalog& catalog);

// Exact top-k by cosine, ties by id. Optional floor drops weaker hits.
std::vector<ScoredId> top_k_semantic(const EmbeddingIndex& index, const Embedding& query,
                                     std::size_t k, std::optional<double> min_cosine = std::nullopt);

void save_embedding_index(const EmbeddingIndex& index, const std::string& path);
EmbeddingIndex load_embedding_index(const std::string& path);

// ---- exact n-gram ---------------------------------------------------------

struct NgramConfig {
  std::set<std::string, std::less<>> stopwords = default_stopwords();
  bool case_sensitive = false;

  static std::set<std::string, std::less<>> default_stopwords();
  static std::set<std::string, std::less<>> load_stopwords(const std::string& path);
};

inline constexpr std::size_t kNgramMax = 3;

struct NgramIndex {
  std::map<std::string, std::set<std::string>, std::less<>> keys;  // n-gram -> node ids
  NgramConfig config;
  std::string source_fingerprint;
};

// Per-token canonical form used on both sides of n-gram matching.
std::vector<std::string> ngram_tokens(std::string_view text, bool case_sensitive = false);

// Indexes node names of at most three tokens; single stopwords are skipped.
NgramIndex build_ngram_index(const KnowledgeGraph& graph, NgramConfig config = {});

std::set<std::string> match_ngrams(const NgramIndex& index, std::string_view query);

// ---- BM25 -----------------------------------------------------------------

enum class FieldMode { DescriptionOnly, DescriptionPlusTitle };

const char* to_string(FieldMode mode);
std::optional<FieldMode> parse_field_mode(std::string_view name);

struct Bm25Config {
  TokenizerMode tokenizer = TokenizerMode::WordBoundary;
  FieldMode fields = FieldMode::DescriptionPlusTitle;
  double k1 = 1.5;
  double b = 0.75;
};

struct Bm25Document {
  std::string id;
  std::string text;
};

class Bm25Index {
 public:
  Bm25Index(std::span<const Bm25Document> documents, Bm25Config config);

  const Bm25Config& config() const { return config_; }
  std::size_t size() const { return ids_.size(); }
  double average_length() const { return avgdl_; }
  std::size_t document_frequency(std::string_view term) const;

  // score(d) = sum over query tokens of idf(t) * tf(k1+1) / (tf + k1(1-b+b|d|/avgdl)),
  // idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5)). Zero scores omitted; ties by id.
  std::vector<ScoredId> scores(std::span<const std::string> query_tokens) const;
  std::vector<ScoredId> search(std::string_view query) const;

 private:
  Bm25Config config_;
  std::vector<std::string> ids_;
  std::vector<std::map<std::string, std::size_t, std::less<>>> term_freqs_;
  std::vector<std::size_t> lengths_;
  std::map<std::string, std::size_t, std::less<>> doc_freqs_;
  double avgdl_ = 0.0;
};

Bm25Index build_bm25_index(const Catalog& catalog, Bm25Config config = {});

inline std::vector<ScoredId> bm25_scores(const Bm25Index& index,
                                         std::span<const std::string> query_tokens) {
  return index.scores(query_tokens);
}

}  // namespace toolkg
