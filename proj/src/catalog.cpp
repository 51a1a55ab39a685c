#include "toolkg/catalog.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "toolkg/error.hpp"

namespace toolkg {
namespace {

bool blank(std::string_view s) {
  return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

// Reads a string field; `required` fields must be present.
std::string string_field(const nlohmann::json& obj, const char* key, bool required,
                         const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (required) throw Error(ErrorKind::Parse, "catalog", where + ": field '" + key + "' is missing");
    return {};
  }
  if (!it->is_string()) {
    throw Error(ErrorKind::Parse, "catalog", where + ": field '" + key + "' must be a string");
  }
  return it->get<std::string>();
}

ToolSpec parse_record(const nlohmann::json& record, const std::string& where) {
  if (!record.is_object()) throw Error(ErrorKind::Parse, "catalog", where + ": record is not an object");
  ToolSpec spec;
  spec.tool_id = string_field(record, "tool_id", true, where);
  spec.title = string_field(record, "title", true, where);
  spec.description = string_field(record, "description", false, where);
  if (auto it = record.find("parameters"); it != record.end()) {
    if (!it->is_array()) {
      throw Error(ErrorKind::Parse, "catalog", where + ": field 'parameters' must be an array");
    }
    for (std::size_t i = 0; i < it->size(); ++i) {
      const auto& p = (*it)[i];
      const auto pwhere = where + ": parameters[" + std::to_string(i) + "]";
      if (!p.is_object()) throw Error(ErrorKind::Parse, "catalog", pwhere + " is not an object");
      spec.parameters.push_back({string_field(p, "name", true, pwhere),
                                 string_field(p, "description", false, pwhere),
                                 string_field(p, "value_type", false, pwhere)});
    }
  }
  if (auto it = record.find("metadata"); it != record.end()) {
    if (!it->is_object()) {
      throw Error(ErrorKind::Parse, "catalog", where + ": field 'metadata' must be an object");
    }
    for (const auto& [key, value] : it->items()) {
      if (!value.is_string()) {
        throw Error(ErrorKind::Parse, "catalog",
                    where + ": field 'metadata." + key + "' must be a string");
      }
      spec.metadata[key] = value.get<std::string>();
    }
  }
  return spec;
}

}  // namespace

const ToolSpec* Catalog::find(std::string_view tool_id) const {
  for (const auto& t : tools) {
    if (t.tool_id == tool_id) return &t;
  }
  return nullptr;
}

std::vector<Issue> validate_tool(const ToolSpec& spec, const Ontology& ontology) {
  std::vector<Issue> issues;
  if (blank(spec.tool_id)) issues.push_back({"tool_id", "must not be empty"});
  if (blank(spec.title)) issues.push_back({"title", "must not be empty"});
  std::set<std::string> seen;
  for (std::size_t i = 0; i < spec.parameters.size(); ++i) {
    const auto& p = spec.parameters[i];
    const auto field = "parameters[" + std::to_string(i) + "].name";
    if (blank(p.name)) {
      issues.push_back({field, "must not be empty"});
    } else if (!seen.insert(p.name).second) {
      issues.push_back({field, "duplicate parameter name '" + p.name + "'"});
    }
  }
  for (const auto& [key, value] : spec.metadata) {
    if (!ontology.has_entity_type(key)) {
      issues.push_back({"metadata." + key, "key '" + key + "' is not an ontology entity type"});
    } else if (split_metadata_values(value).empty()) {
      issues.push_back({"metadata." + key, "value must not be empty"});
    }
  }
  return issues;
}

Catalog parse_catalog(std::istream& in, const std::string& source_name, const Ontology& ontology) {
  Catalog catalog;
  catalog.source_path = source_name;
  std::map<std::string, std::size_t> first_seen;
  std::string line;
  std::size_t line_no = 0;
  std::size_t record = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    const auto where = source_name + ": record " + std::to_string(record) + " (line " +
                       std::to_string(line_no) + ")";
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::Parse, "catalog", where + ": " + e.what());
    }
    auto spec = parse_record(doc, where);
    const auto issues = validate_tool(spec, ontology);
    if (!issues.empty()) {
      std::string msg = where + ": invalid tool";
      for (const auto& issue : issues) msg += "; " + issue.field + ": " + issue.message;
      throw Error(ErrorKind::Validation, "catalog", msg);
    }
    if (auto [it, inserted] = first_seen.emplace(spec.tool_id, record); !inserted) {
      throw Error(ErrorKind::Validation, "catalog",
                  source_name + ": duplicate tool_id '" + spec.tool_id + "' in records " +
                      std::to_string(it->second) + " and " + std::to_string(record));
    }
    catalog.tools.push_back(std::move(spec));
    ++record;
  }
  if (in.bad()) throw Error(ErrorKind::Io, "catalog", "read failure on '" + source_name + "'");
  return catalog;
}

Catalog load_catalog(const std::string& path, const Ontology& ontology) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "catalog", "cannot read catalog '" + path + "'");
  return parse_catalog(in, path, ontology);
}

nlohmann::json to_json(const ToolSpec& spec) {
  nlohmann::json params = nlohmann::json::array();
  for (const auto& p : spec.parameters) {
    params.push_back({{"name", p.name}, {"description", p.description}, {"value_type", p.value_type}});
  }
  return {{"tool_id", spec.tool_id},
          {"title", spec.title},
          {"description", spec.description},
          {"parameters", params},
          {"metadata", spec.metadata}};
}

ToolSpec tool_from_json(const nlohmann::json& record) { return parse_record(record, "record"); }

std::string serialize_catalog(const Catalog& catalog) {
  std::string out;
  for (const auto& tool : catalog.tools) {
    out += to_json(tool).dump();
    out += '\n';
  }
  return out;
}

void save_catalog(const Catalog& catalog, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "catalog", "cannot write catalog '" + path + "'");
  out << serialize_catalog(catalog);
}

std::vector<std::string> split_metadata_values(std::string_view value) {
  std::vector<std::string> values;
  std::size_t start = 0;
  while (start <= value.size()) {
    const auto end = value.find(';', start);
    const auto piece = trim(value.substr(start, end == std::string_view::npos ? end : end - start));
    if (!piece.empty()) values.push_back(piece);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return values;
}

std::string tool_document(const ToolSpec& spec) {
  if (spec.description.empty()) return spec.title;
  return spec.title + ". " + spec.description;
}

}  // namespace toolkg
