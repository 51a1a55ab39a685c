#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "toolkg/ontology.hpp"

namespace toolkg {

struct ParameterSpec {
  std::string name;
  std::string description;
  std::string value_type;  // free text, e.g. "enum [High, Medium, Low]"

  bool operator==(const ParameterSpec&) const = default;
};

// Metadata is keyed by ontology entity type (line_of_business, department,
// ...). A value may hold several entries separated by ';'.
struct ToolSpec {
  std::string tool_id;
  std::string title;
  std::string description;
  std::vector<ParameterSpec> parameters;
  std::map<std::string, std::string> metadata;

  bool operator==(const ToolSpec&) const = default;
};

struct Catalog {
  std::vector<ToolSpec> tools;
  std::string source_path;

  const ToolSpec* find(std::string_view tool_id) const;
  bool operator==(const Catalog& other) const { return tools == other.tools; }
};

struct Issue {
  std::string field;  // e.g. "title", "parameters[1].name", "metadata.galaxy"
  std::string message;

  bool operator==(const Issue&) const = default;
};

std::vector<Issue> validate_tool(const ToolSpec& spec, const Ontology& ontology);

// Line-delimited JSON, one tool per line. Blank lines are skipped. The whole
// file is rejected if any record is malformed or invalid.
Catalog load_catalog(const std::string& path, const Ontology& ontology = Ontology::defaults());
Catalog parse_catalog(std::istream& in, const std::string& source_name,
                      const Ontology& ontology = Ontology::defaults());

std::string serialize_catalog(const Catalog& catalog);
void save_catalog(const Catalog& catalog, const std::string& path);

nlohmann::json to_json(const ToolSpec& spec);
ToolSpec tool_from_json(const nlohmann::json& record);

std::vector<std::string> split_metadata_values(std::string_view value);

// Title + description, the text every tool-level ranker sees.
std::string tool_document(const ToolSpec& spec);

}  // namespace toolkg
