#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "toolkg/canonical.hpp"
#include "toolkg/catalog.hpp"
#include "toolkg/kg.hpp"
#include "toolkg/ontology.hpp"
#include "toolkg/providers.hpp"
#include "toolkg/triple.hpp"

namespace toolkg {

// Rule triples from structured fields: (title, has_parameter, name) for each
// parameter, then (title, has_<key>, value) for each metadata value.
std::vector<RawTriple> default_triples(const ToolSpec& spec, const Ontology& ontology);

std::string render_extraction_prompt(const ToolSpec& spec, const Ontology& ontology);

// Generator-backed open extraction. Keeps only in-ontology relationships,
// drops exact duplicates and head == tail triples.
std::vector<RawTriple> extract_triples(const ToolSpec& spec, const Ontology& ontology,
                                       Generator& generator,
                                       const SynonymTable& table = SynonymTable::defaults());

struct DiscardReport {
  std::size_t out_of_ontology = 0;
  std::size_t self_loops = 0;
  std::size_t duplicates = 0;
  std::size_t invalid_entities = 0;

  std::size_t total() const { return out_of_ontology + self_loops + duplicates + invalid_entities; }
  DiscardReport& operator+=(const DiscardReport& other);
};

struct CanonicalTriples {
  std::vector<Triple> triples;
  DiscardReport discards;
};

// Canonicalizes and types raw triples of one tool. `tool_node_name`
// overrides the canonical title used for the tool node.
CanonicalTriples canonicalize_triples(std::span<const RawTriple> raw, const ToolSpec& tool,
                                      const Ontology& ontology, const SynonymTable& table,
                                      std::string_view tool_node_name = {});

struct ToolBuildEntry {
  std::string tool_id;
  std::string node_name;
  std::size_t default_triples = 0;
  std::size_t extracted_triples = 0;
  std::size_t kept_triples = 0;
  DiscardReport discards;
  bool extraction_skipped = false;
  std::string skip_reason;
};

struct BuildReport {
  std::vector<ToolBuildEntry> tools;
  std::vector<std::string> notes;

  nlohmann::json to_json() const;
};

struct BuildResult {
  KnowledgeGraph graph;
  BuildReport report;
};

// Node metadata keys set on tool nodes.
inline constexpr const char* kToolIdKey = "tool_id";
inline constexpr const char* kDescriptionKey = "description";
inline constexpr const char* kTitleKey = "title";

BuildResult build_graph(const Catalog& catalog, const Ontology& ontology,
                        const SynonymTable& table, Generator* generator = nullptr);

}  // namespace toolkg
