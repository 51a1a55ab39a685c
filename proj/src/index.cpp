#include "toolkg/index.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "toolkg/canonical.hpp"
#include "toolkg/error.hpp"
#include "toolkg/extraction.hpp"
#include "utf8.hpp"

namespace toolkg {
namespace {

bool ranks_before(const ScoredId& a, const ScoredId& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.id < b.id;
}

EmbeddingIndex embed_entries(std::vector<EmbeddingEntry> entries, Embedder& embedder,
                             std::size_t batch_size, std::string source_fingerprint) {
  std::sort(entries.begin(), entries.end(),
            [](const EmbeddingEntry& a, const EmbeddingEntry& b) { return a.id < b.id; });
  EmbeddingIndex index;
  index.provider_fingerprint = embedder.fingerprint();
  index.source_fingerprint = std::move(source_fingerprint);
  batch_size = std::max<std::size_t>(batch_size, 1);
  for (std::size_t start = 0; start < entries.size(); start += batch_size) {
    const auto end = std::min(entries.size(), start + batch_size);
    std::vector<std::string> texts;
    for (std::size_t i = start; i < end; ++i) texts.push_back(entries[i].text);
    std::vector<Embedding> vectors;
    try {
      vectors = embedder.embed(texts);
    } catch (const Error& e) {
      throw Error(e.kind(), "index",
                  "embedding entries '" + entries[start].id + "'..'" + entries[end - 1].id +
                      "': " + e.what());
    }
    for (std::size_t i = start; i < end; ++i) {
      auto& v = vectors[i - start];
      if (index.dim == 0) index.dim = v.dim();
      if (v.dim() != index.dim) {
        throw Error(ErrorKind::ProviderContract, "index",
                    "embedding for '" + entries[i].id + "' has dim " + std::to_string(v.dim()) +
                        ", expected " + std::to_string(index.dim));
      }
      entries[i].embedding = std::move(v);
    }
  }
  index.entries = std::move(entries);
  return index;
}

}  // namespace

std::string EmbeddingIndex::fingerprint() const {
  return hex64(fnv1a64(provider_fingerprint + "|" + source_fingerprint + "|" + std::to_string(dim)));
}

std::string node_index_text(const Node& node) {
  std::string text = node.name + " " + node.node_type;
  if (node.node_type == "tool") {
    if (auto it = node.metadata.find(kDescriptionKey); it != node.metadata.end() && !it->second.empty()) {
      text += " " + it->second;
    }
  }
  return text;
}

EmbeddingIndex build_embedding_index(const KnowledgeGraph& graph, Embedder& embedder,
                                     std::size_t batch_size) {
  std::vector<EmbeddingEntry> entries;
  for (const auto& [id, node] : graph.nodes()) entries.push_back({id, {}, node_index_text(node)});
  return embed_entries(std::move(entries), embedder, batch_size, graph.fingerprint());
}

std::string catalog_fingerprint(const Catalog& catalog) {
  return hex64(fnv1a64(serialize_catalog(catalog)));
}

EmbeddingIndex build_tool_index(const Catalog& catalog, Embedder& embedder, std::size_t batch_size) {
  std::vector<EmbeddingEntry> entries;
  for (const auto& tool : catalog.tools) entries.push_back({tool.tool_id, {}, tool_document(tool)});
  return embed_entries(std::move(entries), embedder, batch_size, catalog_fingerprint(catalog));
}

std::vector<ScoredId> top_k_semantic(const EmbeddingIndex& index, const Embedding& query,
                                     std::size_t k, std::optional<double> min_cosine) {
  if (k == 0) throw Error(ErrorKind::Contract, "index", "top_k_semantic requires k >= 1");
  if (index.entries.empty()) return {};
  if (query.dim() != index.dim) {
    throw Error(ErrorKind::Contract, "index",
                "query dim " + std::to_string(query.dim()) + " does not match index dim " +
                    std::to_string(index.dim));
  }
  std::vector<ScoredId> scored;
  scored.reserve(index.entries.size());
  for (const auto& e : index.entries) {
    const double c = cosine(query, e.embedding);
    if (min_cosine && c < *min_cosine) continue;
    scored.push_back({e.id, c});
  }
  const auto keep = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(),
                    ranks_before);
  scored.resize(keep);
  return scored;
}

void save_embedding_index(const EmbeddingIndex& index, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "index", "cannot write index '" + path + "'");
  nlohmann::json header = {{"format", "toolkg-embedding-index"},
                           {"format_version", 1},
                           {"dim", index.dim},
                           {"provider", index.provider_fingerprint},
                           {"source", index.source_fingerprint},
                           {"count", index.entries.size()}};
  out << header.dump() << '\n';
  for (const auto& e : index.entries) {
    nlohmann::json rec = {{"id", e.id}, {"text", e.text}, {"vector", e.embedding.values}};
    out << rec.dump() << '\n';
  }
}

EmbeddingIndex load_embedding_index(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "index", "cannot read index '" + path + "'");
  EmbeddingIndex index;
  try {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::Parse, "index", path + ": empty file");
    const auto header = nlohmann::json::parse(line);
    if (header.value("format", "") != "toolkg-embedding-index") {
      throw Error(ErrorKind::Parse, "index", path + ": not an embedding index");
    }
    if (header.at("format_version").get<int>() != 1) {
      throw Error(ErrorKind::Version, "index", path + ": unsupported index format_version");
    }
    index.dim = header.at("dim").get<std::size_t>();
    index.provider_fingerprint = header.at("provider").get<std::string>();
    index.source_fingerprint = header.at("source").get<std::string>();
    const auto count = header.at("count").get<std::size_t>();
    for (std::size_t i = 0; i < count; ++i) {
      if (!std::getline(in, line)) throw Error(ErrorKind::Parse, "index", path + ": truncated");
      const auto rec = nlohmann::json::parse(line);
      EmbeddingEntry e{rec.at("id").get<std::string>(),
                       {rec.at("vector").get<std::vector<double>>()},
                       rec.at("text").get<std::string>()};
      if (e.embedding.dim() != index.dim) {
        throw Error(ErrorKind::Parse, "index", path + ": entry '" + e.id + "' has wrong dim");
      }
      index.entries.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, "index", path + ": " + e.what());
  }
  return index;
}

// ---- n-gram ---------------------------------------------------------------

std::set<std::string, std::less<>> NgramConfig::default_stopwords() {
  return {"a",    "about", "all",  "also", "an",    "and",  "any",  "are",  "as",   "at",
          "be",   "by",    "can",  "could", "do",   "for",  "from", "get",  "give", "have",
          "i",    "if",    "in",   "is",   "it",    "its",  "me",   "my",   "need", "of",
          "on",   "or",    "our",  "please", "show", "so",  "some", "that", "the",  "their",
          "them", "then",  "there", "these", "this", "those", "to",  "us",   "want", "we",
          "what", "when",  "where", "which", "who",  "will", "with", "would", "you", "your"};
}

std::set<std::string, std::less<>> NgramConfig::load_stopwords(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "index", "cannot read stopword list '" + path + "'");
  std::set<std::string, std::less<>> words;
  std::string line;
  while (std::getline(in, line)) {
    for (auto& t : tokenize(line, TokenizerMode::Whitespace)) {
      if (!t.starts_with("#")) words.insert(std::move(t));
    }
  }
  return words;
}

std::vector<std::string> ngram_tokens(std::string_view text, bool case_sensitive) {
  std::vector<std::string> tokens;
  if (case_sensitive) {
    std::string current;
    for (std::size_t i = 0; i < text.size();) {
      const auto cp = utf8::decode(text, i);
      if (utf8::is_word(cp.value)) {
        current.append(text.substr(i, cp.length));
      } else if (!current.empty()) {
        tokens.push_back(std::move(current));
        current.clear();
      }
      i += cp.length;
    }
    if (!current.empty()) tokens.push_back(std::move(current));
  } else {
    tokens = tokenize(text, TokenizerMode::WordBoundary);
  }
  for (auto& t : tokens) t = singularize(t);
  return tokens;
}

namespace {

std::string join_window(const std::vector<std::string>& tokens, std::size_t start, std::size_t n) {
  std::string key = tokens[start];
  for (std::size_t i = 1; i < n; ++i) key += " " + tokens[start + i];
  return key;
}

}  // namespace

NgramIndex build_ngram_index(const KnowledgeGraph& graph, NgramConfig config) {
  NgramIndex index;
  index.config = std::move(config);
  index.source_fingerprint = graph.fingerprint();
  for (const auto& [id, node] : graph.nodes()) {
    const auto tokens = ngram_tokens(node.name);
    if (tokens.empty() || tokens.size() > kNgramMax) continue;
    if (tokens.size() == 1 && index.config.stopwords.contains(tokens.front())) continue;
    index.keys[join_window(tokens, 0, tokens.size())].insert(id);
  }
  return index;
}

std::set<std::string> match_ngrams(const NgramIndex& index, std::string_view query) {
  std::set<std::string> hits;
  const auto tokens = ngram_tokens(query, index.config.case_sensitive);
  for (std::size_t n = 1; n <= kNgramMax; ++n) {
    for (std::size_t start = 0; start + n <= tokens.size(); ++start) {
      if (n == 1 && index.config.stopwords.contains(tokens[start])) continue;
      if (auto it = index.keys.find(join_window(tokens, start, n)); it != index.keys.end()) {
        hits.insert(it->second.begin(), it->second.end());
      }
    }
  }
  return hits;
}

// ---- BM25 -----------------------------------------------------------------

const char* to_string(FieldMode mode) {
  return mode == FieldMode::DescriptionOnly ? "description_only" : "description_plus_title";
}

std::optional<FieldMode> parse_field_mode(std::string_view name) {
  if (name == "description_only") return FieldMode::DescriptionOnly;
  if (name == "description_plus_title") return FieldMode::DescriptionPlusTitle;
  return std::nullopt;
}

Bm25Index::Bm25Index(std::span<const Bm25Document> documents, Bm25Config config)
    : config_(config) {
  if (!(config_.k1 > 0.0)) throw Error(ErrorKind::Config, "index", "BM25 k1 must be > 0");
  if (!(config_.b >= 0.0 && config_.b <= 1.0)) {
    throw Error(ErrorKind::Config, "index", "BM25 b must lie in [0, 1]");
  }
  std::size_t total = 0;
  for (const auto& doc : documents) {
    const auto tokens = tokenize(doc.text, config_.tokenizer);
    std::map<std::string, std::size_t, std::less<>> tf;
    for (const auto& t : tokens) ++tf[t];
    for (const auto& [term, count] : tf) ++doc_freqs_[term];
    ids_.push_back(doc.id);
    lengths_.push_back(tokens.size());
    term_freqs_.push_back(std::move(tf));
    total += tokens.size();
  }
  if (!ids_.empty()) avgdl_ = static_cast<double>(total) / static_cast<double>(ids_.size());
}

std::size_t Bm25Index::document_frequency(std::string_view term) const {
  auto it = doc_freqs_.find(term);
  return it == doc_freqs_.end() ? 0 : it->second;
}

std::vector<ScoredId> Bm25Index::scores(std::span<const std::string> query_tokens) const {
  std::vector<ScoredId> out;
  if (ids_.empty() || avgdl_ == 0.0) return out;
  const double n = static_cast<double>(ids_.size());
  const double k1 = config_.k1;
  const double b = config_.b;
  for (std::size_t d = 0; d < ids_.size(); ++d) {
    double score = 0.0;
    const double norm = k1 * (1.0 - b + b * static_cast<double>(lengths_[d]) / avgdl_);
    for (const auto& term : query_tokens) {
      auto it = term_freqs_[d].find(term);
      if (it == term_freqs_[d].end()) continue;
      const double df = static_cast<double>(document_frequency(term));
      const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
      const double tf = static_cast<double>(it->second);
      score += idf * tf * (k1 + 1.0) / (tf + norm);
    }
    if (score > 0.0) out.push_back({ids_[d], score});
  }
  std::sort(out.begin(), out.end(), ranks_before);
  return out;
}

std::vector<ScoredId> Bm25Index::search(std::string_view query) const {
  const auto tokens = tokenize(query, config_.tokenizer);
  return scores(tokens);
}

Bm25Index build_bm25_index(const Catalog& catalog, Bm25Config config) {
  std::vector<Bm25Document> docs;
  for (const auto& tool : catalog.tools) {
    docs.push_back({tool.tool_id, config.fields == FieldMode::DescriptionOnly
                                      ? tool.description
                                      : tool.title + " " + tool.description});
  }
  return Bm25Index(docs, config);
}

}  // namespace toolkg
