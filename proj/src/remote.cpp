#include <cmath>
#include <cstdlib>

#include <httplib.h>

#include "toolkg/error.hpp"
#include "toolkg/providers.hpp"

namespace toolkg {
namespace {

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

ParsedUrl parse_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorKind::Config, "providers", "provider URL '" + url + "' has no scheme");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

// POSTs a JSON body, retrying transport failures and 5xx answers.
nlohmann::json post_json(const RemoteEndpoint& endpoint, const nlohmann::json& body) {
  const auto url = parse_url(endpoint.url);
  httplib::Client client(url.origin);
  client.set_connection_timeout(endpoint.timeout_seconds, 0);
  client.set_read_timeout(endpoint.timeout_seconds, 0);
  httplib::Headers headers;
  if (!endpoint.api_key.empty()) headers.emplace("Authorization", "Bearer " + endpoint.api_key);

  const int attempts = std::max(1, endpoint.max_attempts);
  std::string last_failure;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    auto res = client.Post(url.path, headers, body.dump(), "application/json");
    if (!res) {
      last_failure = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 401 || res->status == 403) {
      throw Error(ErrorKind::Provider, "providers",
                  endpoint.url + ": authorization rejected (HTTP " + std::to_string(res->status) +
                      ", attempt " + std::to_string(attempt) + "/" + std::to_string(attempts) + ")");
    }
    if (res->status >= 500) {
      last_failure = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw Error(ErrorKind::Provider, "providers",
                  endpoint.url + ": HTTP " + std::to_string(res->status) + " (attempt " +
                      std::to_string(attempt) + "/" + std::to_string(attempts) + ")");
    }
    try {
      return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::parse_error&) {
      throw Error(ErrorKind::ProviderContract, "providers",
                  endpoint.url + ": response body is not JSON");
    }
  }
  throw Error(ErrorKind::Provider, "providers",
              endpoint.url + ": " + last_failure + " after " + std::to_string(attempts) +
                  " attempt(s); retryable");
}

[[noreturn]] void contract(const std::string& msg) {
  throw Error(ErrorKind::ProviderContract, "providers", msg);
}

}  // namespace

RemoteEndpoint endpoint_from_env(const char* url_variable) {
  const char* url = std::getenv(url_variable);
  if (!url || !*url) {
    throw Error(ErrorKind::Config, "providers",
                std::string("environment variable ") + url_variable + " is not set");
  }
  RemoteEndpoint endpoint;
  endpoint.url = url;
  if (const char* key = std::getenv("PROVIDER_API_KEY")) endpoint.api_key = key;
  return endpoint;
}

RemoteEmbedder::RemoteEmbedder(RemoteEndpoint endpoint) : endpoint_(std::move(endpoint)) {}

std::vector<Embedding> RemoteEmbedder::embed(std::span<const std::string> texts) {
  if (texts.empty()) throw Error(ErrorKind::Contract, "providers", "embed called with no texts");
  for (const auto& t : texts) {
    if (t.empty()) throw Error(ErrorKind::Contract, "providers", "embed called with an empty text");
  }
  const auto response = post_json(endpoint_, {{"texts", texts}});
  if (!response.contains("vectors") || !response["vectors"].is_array()) {
    contract(endpoint_.url + ": response lacks a 'vectors' array");
  }
  const auto& vectors = response["vectors"];
  if (vectors.size() != texts.size()) {
    contract(endpoint_.url + ": expected " + std::to_string(texts.size()) + " vectors, got " +
             std::to_string(vectors.size()));
  }
  std::vector<Embedding> out;
  out.reserve(vectors.size());
  std::lock_guard lock(mutex_);
  for (const auto& v : vectors) {
    Embedding e;
    try {
      e.values = v.get<std::vector<double>>();
    } catch (const nlohmann::json::exception&) {
      contract(endpoint_.url + ": vector is not a numeric array");
    }
    if (e.values.empty()) contract(endpoint_.url + ": empty vector");
    for (double x : e.values) {
      if (!std::isfinite(x)) contract(endpoint_.url + ": non-finite vector component");
    }
    if (!dim_) dim_ = e.dim();
    if (*dim_ != e.dim()) {
      contract(endpoint_.url + ": embedding dim drifted from " + std::to_string(*dim_) + " to " +
               std::to_string(e.dim()));
    }
    out.push_back(std::move(e));
  }
  return out;
}

std::string RemoteEmbedder::fingerprint() const { return "remote-embed/" + endpoint_.url; }

RemoteReranker::RemoteReranker(RemoteEndpoint endpoint) : endpoint_(std::move(endpoint)) {}

std::vector<RerankScore> RemoteReranker::rerank(std::string_view query,
                                                std::span<const RerankCandidate> candidates) {
  if (candidates.empty()) {
    throw Error(ErrorKind::Contract, "providers", "rerank called with no candidates");
  }
  nlohmann::json list = nlohmann::json::array();
  for (const auto& c : candidates) list.push_back({{"id", c.id}, {"text", c.text}});
  const auto response = post_json(endpoint_, {{"query", query}, {"candidates", list}});
  if (!response.contains("scores") || !response["scores"].is_array()) {
    contract(endpoint_.url + ": response lacks a 'scores' array");
  }
  const auto& raw = response["scores"];
  if (raw.size() != candidates.size()) {
    contract(endpoint_.url + ": missing score for candidate(s): expected " +
             std::to_string(candidates.size()) + ", got " + std::to_string(raw.size()));
  }
  std::vector<RerankScore> scores;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!raw[i].is_number() || !std::isfinite(raw[i].get<double>())) {
      contract(endpoint_.url + ": score for '" + candidates[i].id + "' is not a finite number");
    }
    scores.push_back({candidates[i].id, raw[i].get<double>()});
  }
  sort_scores(scores);
  return scores;
}

std::string RemoteReranker::fingerprint() const { return "remote-rerank/" + endpoint_.url; }

RemoteGenerator::RemoteGenerator(RemoteEndpoint endpoint) : endpoint_(std::move(endpoint)) {}

GeneratorResponse RemoteGenerator::generate(const GeneratorRequest& request) {
  nlohmann::json response;
  try {
    response = post_json(endpoint_, {{"prompt", request.prompt}, {"schema", to_string(request.schema)}});
  } catch (const Error& e) {
    throw Error(e.kind(), "providers", std::string(e.what()) + " [context " + request.context_id + "]");
  }
  if (!response.contains("text") || !response["text"].is_string()) {
    contract(endpoint_.url + ": response lacks a 'text' string");
  }
  return parse_generator_output(request.schema, response["text"].get<std::string>());
}

}  // namespace toolkg
