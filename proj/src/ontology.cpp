#include "toolkg/ontology.hpp"

#include <fstream>

#include <json.hpp>

#include "toolkg/error.hpp"

namespace toolkg {

bool is_snake_case(std::string_view name) {
  if (name.empty() || name.front() == '_' || name.back() == '_') return false;
  if (name.front() >= '0' && name.front() <= '9') return false;
  char prev = 0;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    if (!ok || (c == '_' && prev == '_')) return false;
    prev = c;
  }
  return true;
}

void Ontology::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::Ontology, "kg", msg); };
  if (entity_types.empty()) fail("ontology has no entity types");
  if (predicate_types.empty()) fail("ontology has no predicate types");
  for (const auto& t : entity_types) {
    if (!is_snake_case(t)) fail("entity type '" + t + "' is not lowercase snake_case");
  }
  for (const auto& p : predicate_types) {
    if (!is_snake_case(p)) fail("predicate '" + p + "' is not lowercase snake_case");
  }
  if (!has_entity_type("tool")) fail("ontology must contain entity type 'tool'");
  if (!has_entity_type("parameter")) fail("ontology must contain entity type 'parameter'");
}

const Ontology& Ontology::defaults() {
  static const Ontology ontology{
      {"business_object", "capability", "department", "line_of_business", "parameter", "tool"},
      {
          // structural defaults derived from tool records
          "has_parameter", "has_line_of_business", "has_department", "has_business_object",
          "has_capability", "has_entity",
          // open relations
          "affects", "assigned_to", "associated_with", "categorized_by", "contains",
          "depends_on", "employed_by", "generated_for", "has_attribute", "includes",
          "involved_in", "managed_by", "part_of", "produces", "receives_from", "related_to",
          "reports_to", "required_for", "responsible_for", "triggered_by", "used_by",
          "used_for",
      }};
  return ontology;
}

nlohmann::json to_json(const Ontology& ontology) {
  return {{"entity_types", ontology.entity_types},
          {"predicate_types", ontology.predicate_types}};
}

Ontology ontology_from_json(const nlohmann::json& doc) {
  Ontology o;
  try {
    for (const auto& t : doc.at("entity_types")) o.entity_types.insert(t.get<std::string>());
    for (const auto& p : doc.at("predicate_types")) o.predicate_types.insert(p.get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, "kg", std::string("ontology: ") + e.what());
  }
  o.validate();
  return o;
}

Ontology Ontology::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "kg", "cannot read ontology '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, "kg", "ontology '" + path + "': " + e.what());
  }
  return ontology_from_json(doc);
}

}  // namespace toolkg
