#pragma once

#include <set>
#include <string>
#include <string_view>

#include <json.hpp>

namespace toolkg {

// Closed vocabularies of node types and edge predicates.
struct Ontology {
  std::set<std::string, std::less<>> entity_types;
  std::set<std::string, std::less<>> predicate_types;

  bool has_entity_type(std::string_view name) const { return entity_types.contains(name); }
  bool has_predicate(std::string_view name) const { return predicate_types.contains(name); }

  // Throws Error(Ontology) if an invariant is broken.
  void validate() const;

  static const Ontology& defaults();
  static Ontology load(const std::string& path);

  bool operator==(const Ontology&) const = default;
};

nlohmann::json to_json(const Ontology& ontology);
Ontology ontology_from_json(const nlohmann::json& doc);

bool is_snake_case(std::string_view name);

}  // namespace toolkg
