#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace toolkg {

// ---- embeddings -----------------------------------------------------------

struct Embedding {
  std::vector<double> values;

  std::size_t dim() const { return values.size(); }
  bool operator==(const Embedding&) const = default;
};

// Cosine similarity; exactly 1.0 for identical vectors, 0.0 if either is zero.
double cosine(const Embedding& a, const Embedding& b);

class Embedder {
 public:
  virtual ~Embedder() = default;
  // One vector per input, same order, constant dim.
  virtual std::vector<Embedding> embed(std::span<const std::string> texts) = 0;
  virtual std::string fingerprint() const = 0;

  Embedding embed_one(const std::string& text);
};

inline constexpr std::size_t kDefaultEmbeddingDim = 256;
inline constexpr std::uint64_t kDefaultSeed = 42;

// Feature-hashed bag of canonical tokens with +-1 signs, L2-normalized.
// Throws Error(Provider) when the text has no tokens.
Embedding local_embed(std::string_view text, std::size_t dim, std::uint64_t seed);

class LocalEmbedder final : public Embedder {
 public:
  explicit LocalEmbedder(std::size_t dim = kDefaultEmbeddingDim, std::uint64_t seed = kDefaultSeed);

  std::vector<Embedding> embed(std::span<const std::string> texts) override;
  std::string fingerprint() const override;

  std::size_t dim() const { return dim_; }
  std::uint64_t seed() const { return seed_; }

 private:
  std::size_t dim_;
  std::uint64_t seed_;
};

// ---- reranking ------------------------------------------------------------

struct RerankCandidate {
  std::string id;
  std::string text;
};

struct RerankScore {
  std::string candidate_ref;
  double score = 0.0;

  bool operator==(const RerankScore&) const = default;
};

// score descending, then id ascending
void sort_scores(std::vector<RerankScore>& scores);

class Reranker {
 public:
  virtual ~Reranker() = default;
  // Scores every candidate once; returns them sorted by sort_scores order.
  virtual std::vector<RerankScore> rerank(std::string_view query,
                                          std::span<const RerankCandidate> candidates) = 0;
  virtual std::string fingerprint() const = 0;
};

// Cosine between local_embed(query) and local_embed(candidate).
class LocalReranker final : public Reranker {
 public:
  explicit LocalReranker(std::size_t dim = kDefaultEmbeddingDim, std::uint64_t seed = kDefaultSeed);

  std::vector<RerankScore> rerank(std::string_view query,
                                  std::span<const RerankCandidate> candidates) override;
  std::string fingerprint() const override;

 private:
  std::size_t dim_;
  std::uint64_t seed_;
};

// ---- structured generation ------------------------------------------------

enum class SchemaTag { Triples, OutputParameters, SequenceVerdict, QueryBundle };

const char* to_string(SchemaTag tag);

struct GeneratorRequest {
  std::string prompt;
  SchemaTag schema = SchemaTag::Triples;
  // Identifies what the prompt is about (tool id, pair, chain); part of the
  // transcript key.
  std::string context_id;
  // Structured view of the prompt inputs, for local generators.
  nlohmann::json context;
};

struct GeneratorResponse {
  std::string raw;
  nlohmann::json parsed;
};

// Throws Error(GeneratorFormat) if `value` does not match the schema.
void validate_schema(SchemaTag tag, const nlohmann::json& value);
// Parses raw model text (code fences tolerated) and validates it.
GeneratorResponse parse_generator_output(SchemaTag tag, const std::string& raw);
// Smallest schema-valid value: empty lists, is_valid=false.
nlohmann::json canned_minimum(SchemaTag tag);

std::string transcript_key(const GeneratorRequest& request);

class Generator {
 public:
  virtual ~Generator() = default;
  virtual GeneratorResponse generate(const GeneratorRequest& request) = 0;
};

// Recorded raw responses keyed by transcript_key. Reads are shared, writes
// serialized.
class TranscriptCache {
 public:
  TranscriptCache() = default;
  TranscriptCache(TranscriptCache&& other) noexcept : entries_(std::move(other.entries_)) {}
  TranscriptCache& operator=(TranscriptCache&& other) noexcept {
    entries_ = std::move(other.entries_);
    return *this;
  }

  static TranscriptCache load(const std::string& path);  // missing file -> empty cache
  void save(const std::string& path) const;

  std::optional<std::string> lookup(const std::string& key) const;
  void store(const std::string& key, const GeneratorRequest& request, const std::string& raw);
  std::size_t size() const;

 private:
  struct Entry {
    std::string schema;
    std::string context_id;
    std::string raw;
  };
  mutable std::mutex mutex_;
  std::map<std::string, Entry> entries_;
};

// Replays transcripts. Uncached requests either fail (strict offline) or get
// canned_minimum.
class ReplayGenerator final : public Generator {
 public:
  ReplayGenerator(const TranscriptCache& cache, bool strict_offline);
  GeneratorResponse generate(const GeneratorRequest& request) override;

 private:
  const TranscriptCache& cache_;
  bool strict_;
};

// Deterministic rule-based responses computed from GeneratorRequest::context.
// Used to synthesize the bundled benchmark without a hosted model.
class TemplateGenerator final : public Generator {
 public:
  explicit TemplateGenerator(std::uint64_t seed = kDefaultSeed) : seed_(seed) {}
  GeneratorResponse generate(const GeneratorRequest& request) override;

 private:
  std::uint64_t seed_;
};

// Forwards to `inner` and records every response into `cache`.
class RecordingGenerator final : public Generator {
 public:
  RecordingGenerator(Generator& inner, TranscriptCache& cache) : inner_(inner), cache_(cache) {}
  GeneratorResponse generate(const GeneratorRequest& request) override;

 private:
  Generator& inner_;
  TranscriptCache& cache_;
};

// ---- remote clients -------------------------------------------------------

struct RemoteEndpoint {
  std::string url;  // http://host[:port]/path
  std::string api_key;
  int max_attempts = 3;
  int timeout_seconds = 30;
};

// Reads PROVIDER_EMBED_URL / PROVIDER_RERANK_URL / PROVIDER_GEN_URL and
// PROVIDER_API_KEY. Throws Error(Config) if the URL variable is unset.
RemoteEndpoint endpoint_from_env(const char* url_variable);

// POST {"texts": [...]} -> {"vectors": [[...], ...]}
class RemoteEmbedder final : public Embedder {
 public:
  explicit RemoteEmbedder(RemoteEndpoint endpoint);
  std::vector<Embedding> embed(std::span<const std::string> texts) override;
  std::string fingerprint() const override;

 private:
  RemoteEndpoint endpoint_;
  std::mutex mutex_;
  std::optional<std::size_t> dim_;
};

// POST {"query": q, "candidates": [{"id", "text"}]} -> {"scores": [...]}
class RemoteReranker final : public Reranker {
 public:
  explicit RemoteReranker(RemoteEndpoint endpoint);
  std::vector<RerankScore> rerank(std::string_view query,
                                  std::span<const RerankCandidate> candidates) override;
  std::string fingerprint() const override;

 private:
  RemoteEndpoint endpoint_;
};

// POST {"prompt": p, "schema": tag} -> {"text": raw}
class RemoteGenerator final : public Generator {
 public:
  explicit RemoteGenerator(RemoteEndpoint endpoint);
  GeneratorResponse generate(const GeneratorRequest& request) override;

 private:
  RemoteEndpoint endpoint_;
};

}  // namespace toolkg
