#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>

namespace toolkg {

// Suffix-rule singularization settings. Words in `no_strip` are never
// singularized; their "-es" plurals (statuses, buses) fold back onto them.
struct InflectionRules {
  std::set<std::string, std::less<>> no_strip;

  static const InflectionRules& defaults();
};

std::string ascii_lower(std::string_view text);

// Singularizes a single lowercase token. Idempotent for every input.
std::string singularize(std::string_view token,
                        const InflectionRules& rules = InflectionRules::defaults());

// Entity surface form -> canonical node name. Lowercases, trims and collapses
// whitespace, strips punctuation around the phrase and singularizes the last
// token. Throws Error(Canonicalization) when nothing is left.
std::string canonicalize_entity(std::string_view surface,
                                const InflectionRules& rules = InflectionRules::defaults());

// Surface predicate -> canonical predicate, with synonyms folded.
class SynonymTable {
 public:
  SynonymTable() = default;

  // Ships the employment example (works at / works for / employed by).
  static SynonymTable defaults();
  // JSON object {"predicates": {surface: canonical}, "entities": {...}}.
  static SynonymTable load(const std::string& path);

  void add_predicate(std::string_view surface, std::string_view canonical);
  void add_entity(std::string_view surface, std::string_view canonical);

  const std::map<std::string, std::string, std::less<>>& predicate_synonyms() const {
    return predicates_;
  }
  const std::map<std::string, std::string, std::less<>>& entity_overrides() const {
    return entities_;
  }

 private:
  std::map<std::string, std::string, std::less<>> predicates_;
  std::map<std::string, std::string, std::less<>> entities_;
};

// Lowercase, trim, whitespace runs -> '_'. No synonym lookup.
std::string normalize_predicate(std::string_view surface);

std::string canonicalize_predicate(std::string_view surface, const SynonymTable& table);

// canonicalize_entity with the table's entity overrides consulted first.
std::string canonicalize_entity(std::string_view surface, const SynonymTable& table,
                                const InflectionRules& rules = InflectionRules::defaults());

}  // namespace toolkg
