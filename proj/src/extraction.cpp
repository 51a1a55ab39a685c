#include "toolkg/extraction.hpp"

#include <map>
#include <set>
#include <tuple>

#include <json.hpp>

#include "toolkg/error.hpp"

namespace toolkg {
namespace {

bool is_provider_failure(ErrorKind kind) {
  return kind == ErrorKind::Provider || kind == ErrorKind::ProviderContract ||
         kind == ErrorKind::GeneratorFormat || kind == ErrorKind::CacheMiss;
}

}  // namespace

DiscardReport& DiscardReport::operator+=(const DiscardReport& other) {
  out_of_ontology += other.out_of_ontology;
  self_loops += other.self_loops;
  duplicates += other.duplicates;
  invalid_entities += other.invalid_entities;
  return *this;
}

std::vector<RawTriple> default_triples(const ToolSpec& spec, const Ontology& ontology) {
  std::vector<RawTriple> out;
  for (const auto& p : spec.parameters) {
    out.push_back({spec.title, "has_parameter", p.name, spec.tool_id, TripleOrigin::DefaultRule});
  }
  for (const auto& [key, value] : spec.metadata) {
    if (!ontology.has_entity_type(key)) continue;
    for (const auto& v : split_metadata_values(value)) {
      out.push_back({spec.title, "has_" + key, v, spec.tool_id, TripleOrigin::DefaultRule});
    }
  }
  return out;
}

std::string render_extraction_prompt(const ToolSpec& spec, const Ontology& ontology) {
  std::string relations;
  for (const auto& p : ontology.predicate_types) {
    if (p.starts_with("has_")) continue;
    if (!relations.empty()) relations += ", ";
    relations += p;
  }
  std::string params;
  for (const auto& p : spec.parameters) {
    if (!params.empty()) params += ", ";
    params += p.name;
  }
  std::string text = "The tool titled '" + spec.title + "'";
  if (auto it = spec.metadata.find("line_of_business"); it != spec.metadata.end()) {
    text += " belongs to the line of business '" + it->second + "'";
  }
  text += ". Its description reads: '" + spec.description + "'.";
  if (!params.empty()) text += " Its parameters are: " + params + ".";

  return "You build knowledge graphs from tool documentation in an enterprise assistant catalog.\n"
         "\n"
         "Task: read the text below and extract triplets of the form "
         "{\"head\": ..., \"tail\": ..., \"relationship\": ...}.\n"
         "- head: the entity that acts or is described\n"
         "- relationship: how head relates to tail\n"
         "- tail: the entity that is acted on or related\n"
         "\n"
         "Always add these pattern triplets:\n"
         "- has_line_of_business: tool title -> its line of business\n"
         "- has_entity: tool title -> every entity mentioned in the text, including every head "
         "and tail you use elsewhere\n"
         "- has_parameter: tool title -> every listed parameter\n"
         "\n"
         "Other relationships you may use: " + relations + ".\n"
         "\n"
         "Rules:\n"
         "- never repeat a triplet\n"
         "- head and tail must differ\n"
         "- the tool title may only be the head of has_line_of_business, has_entity and "
         "has_parameter triplets\n"
         "- split complex sentences into simple facts\n"
         "- name entities and relationships consistently\n"
         "\n"
         "Answer with one JSON object and nothing else:\n"
         "{\"relationships\": [{\"head\": \"...\", \"tail\": \"...\", \"relationship\": \"...\"}]}\n"
         "\n"
         "Text:\n" + text + "\n";
}

std::vector<RawTriple> extract_triples(const ToolSpec& spec, const Ontology& ontology,
                                       Generator& generator, const SynonymTable& table) {
  GeneratorRequest request;
  request.prompt = render_extraction_prompt(spec, ontology);
  request.schema = SchemaTag::Triples;
  request.context_id = spec.tool_id;
  request.context = {{"tool", to_json(spec)}, {"ontology", to_json(ontology)}};

  GeneratorResponse response;
  try {
    response = generator.generate(request);
  } catch (const Error& e) {
    throw Error(e.kind(), e.module(), "tool '" + spec.tool_id + "': " + e.what());
  }

  std::vector<RawTriple> out;
  std::set<std::tuple<std::string, std::string, std::string>> seen;
  for (const auto& r : response.parsed.at("relationships")) {
    RawTriple t{r.at("head").get<std::string>(), r.at("relationship").get<std::string>(),
                r.at("tail").get<std::string>(), spec.tool_id, TripleOrigin::Llm};
    if (t.head.empty() || t.tail.empty() || t.relationship.empty()) continue;
    if (!ontology.has_predicate(canonicalize_predicate(t.relationship, table))) continue;
    try {
      if (canonicalize_entity(t.head, table) == canonicalize_entity(t.tail, table)) continue;
    } catch (const Error&) {
      continue;  // punctuation-only endpoint
    }
    if (!seen.emplace(t.head, t.relationship, t.tail).second) continue;
    out.push_back(std::move(t));
  }
  return out;
}

CanonicalTriples canonicalize_triples(std::span<const RawTriple> raw, const ToolSpec& tool,
                                      const Ontology& ontology, const SynonymTable& table,
                                      std::string_view tool_node_name) {
  CanonicalTriples result;
  const std::string title = canonicalize_entity(tool.title, table);
  const std::string tool_name = tool_node_name.empty() ? title : std::string(tool_node_name);

  auto endpoint_type = [&](const std::string& canonical) -> std::pair<std::string, std::string> {
    if (canonical == title) return {tool_name, "tool"};
    return {canonical, "business_object"};
  };

  std::set<std::tuple<std::string, std::string, std::string, std::string, std::string>> seen;
  for (const auto& r : raw) {
    const auto predicate = canonicalize_predicate(r.relationship, table);
    if (!ontology.has_predicate(predicate)) {
      ++result.discards.out_of_ontology;
      continue;
    }
    std::string subject, object;
    try {
      subject = canonicalize_entity(r.head, table);
      object = canonicalize_entity(r.tail, table);
    } catch (const Error&) {
      ++result.discards.invalid_entities;
      continue;
    }

    Triple t;
    t.predicate = predicate;
    t.source_tool = r.source_tool;
    t.origin = r.origin;
    if (r.origin == TripleOrigin::DefaultRule) {
      t.subject = tool_name;
      t.subject_type = "tool";
    } else {
      std::tie(t.subject, t.subject_type) = endpoint_type(subject);
    }
    const auto typed_suffix = predicate.starts_with("has_") ? predicate.substr(4) : std::string();
    if (!typed_suffix.empty() && ontology.has_entity_type(typed_suffix)) {
      t.object = object;
      t.object_type = typed_suffix;
      if (typed_suffix == "tool") std::tie(t.object, t.object_type) = endpoint_type(object);
    } else {
      std::tie(t.object, t.object_type) = endpoint_type(object);
    }

    if (!ontology.has_entity_type(t.subject_type) || !ontology.has_entity_type(t.object_type)) {
      ++result.discards.out_of_ontology;
      continue;
    }
    if (t.subject == t.object && t.subject_type == t.object_type) {
      ++result.discards.self_loops;
      continue;
    }
    if (!seen.emplace(t.subject, t.subject_type, t.predicate, t.object, t.object_type).second) {
      ++result.discards.duplicates;
      continue;
    }
    result.triples.push_back(std::move(t));
  }
  return result;
}

nlohmann::json BuildReport::to_json() const {
  nlohmann::json tools_json = nlohmann::json::array();
  for (const auto& e : tools) {
    tools_json.push_back({{"tool_id", e.tool_id},
                          {"node_name", e.node_name},
                          {"default_triples", e.default_triples},
                          {"extracted_triples", e.extracted_triples},
                          {"kept_triples", e.kept_triples},
                          {"discarded",
                           {{"out_of_ontology", e.discards.out_of_ontology},
                            {"self_loops", e.discards.self_loops},
                            {"duplicates", e.discards.duplicates},
                            {"invalid_entities", e.discards.invalid_entities}}},
                          {"extraction_skipped", e.extraction_skipped},
                          {"skip_reason", e.skip_reason}});
  }
  return {{"tools", tools_json}, {"notes", notes}};
}

BuildResult build_graph(const Catalog& catalog, const Ontology& ontology,
                        const SynonymTable& table, Generator* generator) {
  BuildResult result{KnowledgeGraph(ontology), {}};
  std::map<std::string, std::string> title_owner;  // tool node name -> tool_id

  for (const auto& tool : catalog.tools) {
    ToolBuildEntry entry;
    entry.tool_id = tool.tool_id;

    std::string node_name = canonicalize_entity(tool.title, table);
    if (auto it = title_owner.find(node_name); it != title_owner.end()) {
      const auto renamed = canonicalize_entity(tool.title + " " + tool.tool_id, table);
      result.report.notes.push_back("tool '" + tool.tool_id + "' shares canonical title '" +
                                    node_name + "' with '" + it->second + "'; node renamed to '" +
                                    renamed + "'");
      node_name = renamed;
    }
    title_owner.emplace(node_name, tool.tool_id);
    entry.node_name = node_name;

    auto raw = default_triples(tool, ontology);
    entry.default_triples = raw.size();
    if (generator) {
      try {
        auto extracted = extract_triples(tool, ontology, *generator, table);
        entry.extracted_triples = extracted.size();
        raw.insert(raw.end(), extracted.begin(), extracted.end());
      } catch (const Error& e) {
        if (!is_provider_failure(e.kind())) throw;
        entry.extraction_skipped = true;
        entry.skip_reason = std::string(to_string(e.kind())) + ": " + e.what();
      }
    }

    const Metadata tool_meta{{kToolIdKey, tool.tool_id},
                             {kTitleKey, tool.title},
                             {kDescriptionKey, tool.description}};
    result.graph.add_node(node_name, "tool", tool_meta);

    auto canonical = canonicalize_triples(raw, tool, ontology, table, node_name);
    entry.discards = canonical.discards;
    entry.kept_triples = canonical.triples.size();
    for (const auto& t : canonical.triples) {
      const Metadata none;
      const bool subject_is_self = t.subject_type == "tool" && t.subject == node_name;
      const bool object_is_self = t.object_type == "tool" && t.object == node_name;
      result.graph.add_triple(t, subject_is_self ? tool_meta : none,
                              object_is_self ? tool_meta : none);
    }
    result.report.tools.push_back(std::move(entry));
  }
  return result;
}

}  // namespace toolkg
