#include "toolkg/providers.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "toolkg/canonical.hpp"
#include "toolkg/error.hpp"
#include "toolkg/text.hpp"

namespace toolkg {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

[[noreturn]] void format_error(const std::string& what, const std::string& raw) {
  throw Error(ErrorKind::GeneratorFormat, "providers", what + "; raw output: " + raw);
}

bool is_string_field(const nlohmann::json& obj, const char* key) {
  auto it = obj.find(key);
  return it != obj.end() && it->is_string();
}

}  // namespace

double cosine(const Embedding& a, const Embedding& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorKind::ProviderContract, "providers",
                "cosine of vectors with dims " + std::to_string(a.dim()) + " and " +
                    std::to_string(b.dim()));
  }
  if (a.values == b.values) {
    for (double v : a.values) {
      if (v != 0.0) return 1.0;
    }
    return 0.0;
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

Embedding Embedder::embed_one(const std::string& text) {
  std::vector<std::string> batch{text};
  auto out = embed(batch);
  return std::move(out.front());
}

Embedding local_embed(std::string_view text, std::size_t dim, std::uint64_t seed) {
  if (dim < 8) {
    throw Error(ErrorKind::Contract, "providers", "local embedding dim must be >= 8");
  }
  Embedding e{std::vector<double>(dim, 0.0)};
  const std::uint64_t basis = splitmix64(seed);
  for (const auto& raw : tokenize(text, TokenizerMode::WordBoundary)) {
    const auto token = canonicalize_entity(raw);
    const std::uint64_t h = fnv1a64(token, basis);
    const std::uint64_t mixed = splitmix64(h);
    e.values[h % dim] += (mixed & 1ULL) ? -1.0 : 1.0;
  }
  double norm = 0.0;
  for (double v : e.values) norm += v * v;
  if (norm == 0.0) {
    throw Error(ErrorKind::Provider, "providers",
                "local embedding of '" + std::string(text) + "' is the zero vector");
  }
  norm = std::sqrt(norm);
  for (double& v : e.values) v /= norm;
  return e;
}

LocalEmbedder::LocalEmbedder(std::size_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
  if (dim_ < 8) throw Error(ErrorKind::Config, "providers", "local embedding dim must be >= 8");
}

std::vector<Embedding> LocalEmbedder::embed(std::span<const std::string> texts) {
  if (texts.empty()) throw Error(ErrorKind::Contract, "providers", "embed called with no texts");
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    if (t.empty()) throw Error(ErrorKind::Contract, "providers", "embed called with an empty text");
    out.push_back(local_embed(t, dim_, seed_));
  }
  return out;
}

std::string LocalEmbedder::fingerprint() const {
  return "local-hash/dim=" + std::to_string(dim_) + "/seed=" + std::to_string(seed_);
}

void sort_scores(std::vector<RerankScore>& scores) {
  std::sort(scores.begin(), scores.end(), [](const RerankScore& a, const RerankScore& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.candidate_ref < b.candidate_ref;
  });
}

LocalReranker::LocalReranker(std::size_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {}

std::vector<RerankScore> LocalReranker::rerank(std::string_view query,
                                               std::span<const RerankCandidate> candidates) {
  if (candidates.empty()) {
    throw Error(ErrorKind::Contract, "providers", "rerank called with no candidates");
  }
  const auto q = local_embed(query, dim_, seed_);
  std::vector<RerankScore> scores;
  scores.reserve(candidates.size());
  for (const auto& c : candidates) {
    double s = 0.0;
    try {
      s = cosine(q, local_embed(c.text, dim_, seed_));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Provider) throw;  // tokenless candidate scores 0
    }
    scores.push_back({c.id, s});
  }
  sort_scores(scores);
  return scores;
}

std::string LocalReranker::fingerprint() const {
  return "local-cosine/dim=" + std::to_string(dim_) + "/seed=" + std::to_string(seed_);
}

// ---- generation -----------------------------------------------------------

const char* to_string(SchemaTag tag) {
  switch (tag) {
    case SchemaTag::Triples: return "triples";
    case SchemaTag::OutputParameters: return "output_parameters";
    case SchemaTag::SequenceVerdict: return "sequence_verdict";
    case SchemaTag::QueryBundle: return "query_bundle";
  }
  return "triples";
}

void validate_schema(SchemaTag tag, const nlohmann::json& value) {
  const auto dumped = value.dump();
  switch (tag) {
    case SchemaTag::Triples: {
      if (!value.is_object() || !value.contains("relationships") ||
          !value["relationships"].is_array()) {
        format_error("triples: expected {\"relationships\": [...]}", dumped);
      }
      for (const auto& r : value["relationships"]) {
        if (!r.is_object() || !is_string_field(r, "head") || !is_string_field(r, "tail") ||
            !is_string_field(r, "relationship")) {
          format_error("triples: each relationship needs string head, tail, relationship", dumped);
        }
      }
      return;
    }
    case SchemaTag::OutputParameters: {
      if (!value.is_array()) format_error("output_parameters: expected a JSON array", dumped);
      for (const auto& item : value) {
        if (!item.is_object() || !is_string_field(item, "parameter_name") ||
            !is_string_field(item, "parameter_id")) {
          format_error("output_parameters: items need string parameter_name and parameter_id",
                       dumped);
        }
        auto it = item.find("confidence_score");
        if (it == item.end() || !it->is_number()) {
          format_error("output_parameters: confidence_score must be a number", dumped);
        }
        const double c = it->get<double>();
        if (!(c >= 0.0 && c <= 1.0)) {
          format_error("output_parameters: confidence_score outside [0, 1]", dumped);
        }
        if (item.contains("reasoning") && !item["reasoning"].is_string()) {
          format_error("output_parameters: reasoning must be a string", dumped);
        }
      }
      return;
    }
    case SchemaTag::SequenceVerdict: {
      if (!value.is_object() || !value.contains("is_valid") || !value["is_valid"].is_boolean()) {
        format_error("sequence_verdict: expected boolean is_valid", dumped);
      }
      for (const char* key : {"explanation", "from_scenario_id", "to_scenario_id"}) {
        if (value.contains(key) && !value[key].is_string()) {
          format_error(std::string("sequence_verdict: ") + key + " must be a string", dumped);
        }
      }
      return;
    }
    case SchemaTag::QueryBundle: {
      if (!value.is_object() || !value.contains("queries") || !value["queries"].is_array()) {
        format_error("query_bundle: expected {\"queries\": [...]}", dumped);
      }
      for (const auto& q : value["queries"]) {
        if (!q.is_object() || !is_string_field(q, "query_class") || !is_string_field(q, "query")) {
          format_error("query_bundle: each entry needs string query_class and query", dumped);
        }
      }
      return;
    }
  }
}

GeneratorResponse parse_generator_output(SchemaTag tag, const std::string& raw) {
  std::string_view body = raw;
  auto trim = [](std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return std::string_view{};
    return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
  };
  body = trim(body);
  if (body.starts_with("```")) {
    const auto nl = body.find('\n');
    const auto close = body.rfind("```");
    if (nl != std::string_view::npos && close > nl) body = trim(body.substr(nl + 1, close - nl - 1));
  }
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error&) {
    format_error(std::string(to_string(tag)) + ": output is not valid JSON", raw);
  }
  try {
    validate_schema(tag, parsed);
  } catch (const Error& e) {
    format_error(e.what(), raw);
  }
  return {raw, std::move(parsed)};
}

nlohmann::json canned_minimum(SchemaTag tag) {
  switch (tag) {
    case SchemaTag::Triples: return {{"relationships", nlohmann::json::array()}};
    case SchemaTag::OutputParameters: return nlohmann::json::array();
    case SchemaTag::SequenceVerdict:
      return {{"is_valid", false}, {"explanation", "no transcript available"}};
    case SchemaTag::QueryBundle: return {{"queries", nlohmann::json::array()}};
  }
  return nullptr;
}

std::string transcript_key(const GeneratorRequest& request) {
  const auto hash = fnv1a64(std::string(to_string(request.schema)) + "\n" + request.prompt);
  return request.context_id + "#" + hex64(hash);
}

TranscriptCache TranscriptCache::load(const std::string& path) {
  TranscriptCache cache;
  std::ifstream in(path);
  if (!in) return cache;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    try {
      const auto rec = nlohmann::json::parse(line);
      cache.entries_[rec.at("key").get<std::string>()] =
          Entry{rec.at("schema").get<std::string>(), rec.value("context_id", ""),
                rec.at("response").get<std::string>()};
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Parse, "providers",
                  path + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cache;
}

void TranscriptCache::save(const std::string& path) const {
  std::lock_guard lock(mutex_);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "providers", "cannot write transcripts '" + path + "'");
  for (const auto& [key, entry] : entries_) {
    nlohmann::json rec = {{"key", key},
                          {"schema", entry.schema},
                          {"context_id", entry.context_id},
                          {"response", entry.raw}};
    out << rec.dump() << '\n';
  }
}

std::optional<std::string> TranscriptCache::lookup(const std::string& key) const {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second.raw;
}

void TranscriptCache::store(const std::string& key, const GeneratorRequest& request,
                            const std::string& raw) {
  std::lock_guard lock(mutex_);
  entries_[key] = Entry{to_string(request.schema), request.context_id, raw};
}

std::size_t TranscriptCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

ReplayGenerator::ReplayGenerator(const TranscriptCache& cache, bool strict_offline)
    : cache_(cache), strict_(strict_offline) {}

GeneratorResponse ReplayGenerator::generate(const GeneratorRequest& request) {
  const auto key = transcript_key(request);
  if (auto raw = cache_.lookup(key)) return parse_generator_output(request.schema, *raw);
  if (strict_) {
    throw Error(ErrorKind::CacheMiss, "providers",
                "no transcript for " + std::string(to_string(request.schema)) + " request '" +
                    key + "' in strict offline mode");
  }
  auto minimum = canned_minimum(request.schema);
  return {minimum.dump(), minimum};
}

GeneratorResponse RecordingGenerator::generate(const GeneratorRequest& request) {
  auto response = inner_.generate(request);
  cache_.store(transcript_key(request), request, response.raw);
  return response;
}

}  // namespace toolkg
