#include "toolkg/canonical.hpp"

#include <cctype>
#include <fstream>
#include <vector>

#include <json.hpp>

#include "toolkg/error.hpp"
#include "utf8.hpp"

namespace toolkg {
namespace {

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

// Punctuation removed around an entity phrase. '_' is kept: it is part of
// parameter identifiers.
bool is_strippable(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u < 0x80 && std::ispunct(u) && c != '_';
}

bool is_stem_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || std::isalnum(u) || c == '_';
}

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  for (std::size_t i = 0; i < text.size();) {
    const auto cp = utf8::decode(text, i);
    if (utf8::is_space(cp.value)) {
      if (!current.empty()) words.push_back(std::move(current));
      current.clear();
    } else {
      current.append(text.substr(i, cp.length));
    }
    i += cp.length;
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

// Lowercased, whitespace-collapsed phrase with surrounding punctuation gone.
std::vector<std::string> normalized_words(std::string_view surface) {
  auto words = split_words(ascii_lower(surface));
  bool changed = true;
  while (changed && !words.empty()) {
    changed = false;
    auto& first = words.front();
    std::size_t lead = 0;
    while (lead < first.size() && is_strippable(first[lead])) ++lead;
    if (lead > 0) {
      first.erase(0, lead);
      changed = true;
    }
    if (first.empty()) {
      words.erase(words.begin());
      continue;
    }
    auto& last = words.back();
    std::size_t keep = last.size();
    while (keep > 0 && is_strippable(last[keep - 1])) --keep;
    if (keep < last.size()) {
      last.resize(keep);
      changed = true;
    }
    if (last.empty()) {
      words.pop_back();
      changed = true;
    }
  }
  return words;
}

std::string join(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out.push_back(' ');
    out += w;
  }
  return out;
}

}  // namespace

const InflectionRules& InflectionRules::defaults() {
  static const InflectionRules rules{{
      "access",    "address", "alias",   "analysis", "apparatus", "as",
      "axis",      "basis",   "bonus",   "bus",      "business",  "campus",
      "canvas",    "census",  "class",   "corpus",   "diagnosis", "emphasis",
      "gas",       "has",     "his",     "hypothesis", "is",      "its",
      "lens",      "news",    "plus",    "process",  "radius",    "series",
      "species",   "status",  "synopsis", "thesis",  "this",      "us",
      "virus",     "was",     "yes",
  }};
  return rules;
}

std::string ascii_lower(std::string_view text) {
  std::string out(text);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string singularize(std::string_view token, const InflectionRules& rules) {
  if (rules.no_strip.contains(token)) return std::string(token);
  const std::size_t n = token.size();
  if (n < 3 || token.back() != 's') return std::string(token);

  // statuses -> status, aliases -> alias
  if (ends_with(token, "es")) {
    const auto stem = token.substr(0, n - 2);
    if (rules.no_strip.contains(stem)) return std::string(stem);
  }
  if (n > 4 && ends_with(token, "ies")) {
    return std::string(token.substr(0, n - 3)) + "y";
  }
  for (std::string_view suffix : {"sses", "xes", "zzes", "ches", "shes"}) {
    if (ends_with(token, suffix)) return std::string(token.substr(0, n - 2));
  }
  if (ends_with(token, "ss") || ends_with(token, "us") || ends_with(token, "is")) {
    return std::string(token);
  }
  if (!is_stem_char(token[n - 2])) return std::string(token);
  return std::string(token.substr(0, n - 1));
}

std::string canonicalize_entity(std::string_view surface, const InflectionRules& rules) {
  auto words = normalized_words(surface);
  if (words.empty()) {
    throw Error(ErrorKind::Canonicalization, "extraction",
                "entity '" + std::string(surface) + "' is empty after normalization");
  }
  words.back() = singularize(words.back(), rules);
  return join(words);
}

std::string canonicalize_entity(std::string_view surface, const SynonymTable& table,
                                const InflectionRules& rules) {
  auto canonical = canonicalize_entity(surface, rules);
  const auto& overrides = table.entity_overrides();
  if (auto it = overrides.find(canonical); it != overrides.end()) return it->second;
  return canonical;
}

std::string normalize_predicate(std::string_view surface) {
  std::string out;
  for (const auto& w : split_words(ascii_lower(surface))) {
    if (!out.empty()) out.push_back('_');
    out += w;
  }
  return out;
}

std::string canonicalize_predicate(std::string_view surface, const SynonymTable& table) {
  auto normalized = normalize_predicate(surface);
  const auto& synonyms = table.predicate_synonyms();
  if (auto it = synonyms.find(normalized); it != synonyms.end()) return it->second;
  return normalized;
}

namespace {

// Keeps the mapping functional and its targets fixed points.
void insert_mapping(std::map<std::string, std::string, std::less<>>& table,
                    const std::string& key, const std::string& canonical,
                    std::string_view what) {
  auto fail = [&](const std::string& why) {
    throw Error(ErrorKind::Validation, "extraction",
                std::string(what) + " synonym '" + key + "' -> '" + canonical + "': " + why);
  };
  if (auto it = table.find(canonical); it != table.end() && it->second != canonical) {
    fail("target is itself mapped to '" + it->second + "'");
  }
  if (auto it = table.find(key); it != table.end() && it->second != canonical) {
    fail("surface already mapped to '" + it->second + "'");
  }
  if (key != canonical) {
    for (const auto& [surface, target] : table) {
      if (target == key) fail("surface is the target of '" + surface + "'");
    }
  }
  table[key] = canonical;
}

}  // namespace

void SynonymTable::add_predicate(std::string_view surface, std::string_view canonical) {
  const auto target = normalize_predicate(canonical);
  if (target.empty() || target != canonical) {
    throw Error(ErrorKind::Validation, "extraction",
                "predicate synonym target '" + std::string(canonical) + "' is not canonical");
  }
  const auto key = normalize_predicate(surface);
  if (key.empty()) {
    throw Error(ErrorKind::Validation, "extraction", "empty predicate synonym surface");
  }
  insert_mapping(predicates_, key, target, "predicate");
}

void SynonymTable::add_entity(std::string_view surface, std::string_view canonical) {
  const auto target = canonicalize_entity(canonical);
  if (target != canonical) {
    throw Error(ErrorKind::Validation, "extraction",
                "entity override target '" + std::string(canonical) +
                    "' is not a fixed point of canonicalization");
  }
  insert_mapping(entities_, canonicalize_entity(surface), target, "entity");
}

SynonymTable SynonymTable::defaults() {
  SynonymTable table;
  table.add_predicate("works at", "employed_by");
  table.add_predicate("works for", "employed_by");
  table.add_predicate("employed by", "employed_by");
  return table;
}

SynonymTable SynonymTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "extraction", "cannot read synonym table '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, "extraction", "synonym table '" + path + "': " + e.what());
  }
  SynonymTable table = defaults();
  try {
    if (doc.contains("predicates")) {
      for (const auto& [surface, canonical] : doc.at("predicates").items()) {
        table.add_predicate(surface, canonical.get<std::string>());
      }
    }
    if (doc.contains("entities")) {
      for (const auto& [surface, canonical] : doc.at("entities").items()) {
        table.add_entity(surface, canonical.get<std::string>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, "extraction", "synonym table '" + path + "': " + e.what());
  }
  return table;
}

}  // namespace toolkg
