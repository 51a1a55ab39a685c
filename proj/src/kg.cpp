#include "toolkg/kg.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "toolkg/error.hpp"
#include "toolkg/text.hpp"

namespace toolkg {
namespace {

const std::set<std::string> kNoNeighbors;

void merge_metadata(Metadata& into, const Metadata& from) {
  for (const auto& [key, value] : from) {
    if (key == "name" || key == "id" || key == "type") continue;
    auto [it, inserted] = into.emplace(key, value);
    if (!inserted && value < it->second) it->second = value;
  }
}

}  // namespace

const char* to_string(TripleOrigin origin) {
  return origin == TripleOrigin::Llm ? "llm" : "default_rule";
}

std::string make_node_id(std::string_view node_type, std::string_view name) {
  std::string id(node_type);
  id.push_back(':');
  id.append(name);
  return id;
}

KnowledgeGraph::KnowledgeGraph(Ontology ontology) : ontology_(std::move(ontology)) {
  ontology_.validate();
}

const Node* KnowledgeGraph::node(std::string_view id) const {
  auto it = nodes_.find(id);
  return it == nodes_.end() ? nullptr : &it->second;
}

const std::set<std::string>& KnowledgeGraph::neighbors(std::string_view id) const {
  auto it = adjacency_.find(id);
  return it == adjacency_.end() ? kNoNeighbors : it->second;
}

std::vector<const Node*> KnowledgeGraph::nodes_named(std::string_view name) const {
  std::vector<const Node*> out;
  if (auto it = by_name_.find(name); it != by_name_.end()) {
    for (const auto& id : it->second) out.push_back(node(id));
  }
  return out;
}

const Node& KnowledgeGraph::add_node(std::string_view name, std::string_view node_type,
                                     const Metadata& metadata) {
  if (!ontology_.has_entity_type(node_type)) {
    throw Error(ErrorKind::Ontology, "kg",
                "node type '" + std::string(node_type) + "' is not in the ontology");
  }
  if (name.empty()) throw Error(ErrorKind::Validation, "kg", "node name must not be empty");
  auto id = make_node_id(node_type, name);
  auto it = nodes_.find(id);
  if (it == nodes_.end()) {
    Node n{id, std::string(name), std::string(node_type),
           {{"name", std::string(name)}, {"id", id}, {"type", std::string(node_type)}}};
    it = nodes_.emplace(id, std::move(n)).first;
    adjacency_[id];
    by_name_[std::string(name)].insert(id);
  }
  merge_metadata(it->second.metadata, metadata);
  return it->second;
}

void KnowledgeGraph::add_edge(std::string_view source_id, std::string_view predicate,
                              std::string_view target_id, std::string_view provenance) {
  if (!ontology_.has_predicate(predicate)) {
    throw Error(ErrorKind::Ontology, "kg",
                "predicate '" + std::string(predicate) + "' is not in the ontology");
  }
  if (source_id == target_id) {
    throw Error(ErrorKind::SelfLoop, "kg", "self-loop on node '" + std::string(source_id) + "'");
  }
  if (!node(source_id) || !node(target_id)) {
    throw Error(ErrorKind::NotFound, "kg",
                "edge endpoint missing: '" + std::string(source_id) + "' -> '" +
                    std::string(target_id) + "'");
  }
  Edge e{std::string(source_id), std::string(predicate), std::string(target_id),
         std::string(provenance)};
  auto it = edges_.find(e);
  if (it == edges_.end()) {
    edges_.insert(std::move(e));
    adjacency_[std::string(source_id)].insert(std::string(target_id));
    adjacency_[std::string(target_id)].insert(std::string(source_id));
  } else if (e.provenance < it->provenance) {
    auto handle = edges_.extract(it);
    handle.value().provenance = e.provenance;
    edges_.insert(std::move(handle));
  }
}

void KnowledgeGraph::add_triple(const Triple& triple, const Metadata& subject_metadata,
                                const Metadata& object_metadata) {
  if (!ontology_.has_predicate(triple.predicate)) {
    throw Error(ErrorKind::Ontology, "kg",
                "predicate '" + triple.predicate + "' is not in the ontology");
  }
  const auto subject_id = make_node_id(triple.subject_type, triple.subject);
  const auto object_id = make_node_id(triple.object_type, triple.object);
  if (subject_id == object_id) {
    throw Error(ErrorKind::SelfLoop, "kg", "self-loop triple on '" + subject_id + "'");
  }
  add_node(triple.subject, triple.subject_type, subject_metadata);
  add_node(triple.object, triple.object_type, object_metadata);
  add_edge(subject_id, triple.predicate, object_id, triple.provenance());
}

std::string KnowledgeGraph::fingerprint() const { return hex64(fnv1a64(serialize_graph(*this))); }

bool KnowledgeGraph::operator==(const KnowledgeGraph& other) const {
  if (!(ontology_ == other.ontology_) || nodes_ != other.nodes_) return false;
  return std::equal(edges_.begin(), edges_.end(), other.edges_.begin(), other.edges_.end());
}

std::optional<Node> lookup_node(const KnowledgeGraph& graph, std::string_view canonical_name,
                                std::optional<std::string_view> node_type) {
  if (node_type) {
    if (const Node* n = graph.node(make_node_id(*node_type, canonical_name))) return *n;
    return std::nullopt;
  }
  const auto named = graph.nodes_named(canonical_name);
  if (named.empty()) return std::nullopt;
  // ids are "type:name", so set order is type order
  return *named.front();
}

EgoGraph one_hop_ego(const KnowledgeGraph& graph, std::string_view node_id) {
  if (!graph.node(node_id)) {
    throw Error(ErrorKind::NotFound, "kg", "unknown node '" + std::string(node_id) + "'");
  }
  EgoGraph ego;
  ego.center = std::string(node_id);
  ego.members.insert(ego.center);
  const auto& adj = graph.neighbors(node_id);
  ego.members.insert(adj.begin(), adj.end());
  for (const auto& m : ego.members) {
    // induced edges: walk outgoing edges of every member
    Edge probe{m, "", "", ""};
    for (auto it = graph.edges().lower_bound(probe);
         it != graph.edges().end() && it->source == m; ++it) {
      if (ego.members.contains(it->target)) ego.induced_edges.push_back(*it);
    }
  }
  return ego;
}

std::set<std::string> extract_tool_nodes(const EgoGraph& ego, const KnowledgeGraph& graph) {
  std::set<std::string> tools;
  for (const auto& id : ego.members) {
    const Node* n = graph.node(id);
    if (n && n->node_type == "tool") tools.insert(id);
  }
  return tools;
}

// ---- persistence ----------------------------------------------------------

std::string serialize_graph(const KnowledgeGraph& graph) {
  std::vector<const Node*> nodes;
  nodes.reserve(graph.nodes().size());
  for (const auto& [id, n] : graph.nodes()) nodes.push_back(&n);
  std::sort(nodes.begin(), nodes.end(), [](const Node* a, const Node* b) {
    if (a->node_type != b->node_type) return a->node_type < b->node_type;
    return a->name < b->name;
  });

  std::string out;
  nlohmann::json header = {{"format", "toolkg-graph"},
                           {"format_version", kGraphFormatVersion},
                           {"ontology", to_json(graph.ontology())},
                           {"node_count", graph.nodes().size()},
                           {"edge_count", graph.edges().size()}};
  out += header.dump() + "\n";
  for (const Node* n : nodes) {
    nlohmann::json rec = {
        {"id", n->id}, {"name", n->name}, {"type", n->node_type}, {"metadata", n->metadata}};
    out += rec.dump() + "\n";
  }
  for (const auto& e : graph.edges()) {
    nlohmann::json rec = {{"source", e.source},
                          {"predicate", e.predicate},
                          {"target", e.target},
                          {"provenance", e.provenance}};
    out += rec.dump() + "\n";
  }
  return out;
}

KnowledgeGraph parse_graph(std::istream& in, const std::string& source_name) {
  auto fail = [&](ErrorKind kind, const std::string& msg) {
    throw Error(kind, "kg", source_name + ": " + msg);
  };
  std::string line;
  std::size_t line_no = 0;
  auto next_record = [&](const char* what) {
    if (!std::getline(in, line)) fail(ErrorKind::Parse, std::string("truncated before ") + what);
    ++line_no;
    try {
      return nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      fail(ErrorKind::Parse, "line " + std::to_string(line_no) + ": " + e.what());
    }
    return nlohmann::json();
  };

  try {
    const auto header = next_record("header");
    if (!header.is_object() || header.value("format", "") != "toolkg-graph") {
      fail(ErrorKind::Parse, "not a graph snapshot");
    }
    const int version = header.at("format_version").get<int>();
    if (version != kGraphFormatVersion) {
      fail(ErrorKind::Version, "snapshot format_version " + std::to_string(version) +
                                   " is incompatible with supported version " +
                                   std::to_string(kGraphFormatVersion));
    }
    KnowledgeGraph graph(ontology_from_json(header.at("ontology")));
    const auto node_count = header.at("node_count").get<std::size_t>();
    const auto edge_count = header.at("edge_count").get<std::size_t>();
    for (std::size_t i = 0; i < node_count; ++i) {
      const auto rec = next_record("end of node records");
      const auto name = rec.at("name").get<std::string>();
      const auto type = rec.at("type").get<std::string>();
      if (rec.at("id").get<std::string>() != make_node_id(type, name)) {
        fail(ErrorKind::Parse, "line " + std::to_string(line_no) + ": node id does not match type:name");
      }
      if (graph.node(make_node_id(type, name))) {
        fail(ErrorKind::Parse, "line " + std::to_string(line_no) + ": duplicate node");
      }
      graph.add_node(name, type, rec.at("metadata").get<Metadata>());
    }
    for (std::size_t i = 0; i < edge_count; ++i) {
      const auto rec = next_record("end of edge records");
      graph.add_edge(rec.at("source").get<std::string>(), rec.at("predicate").get<std::string>(),
                     rec.at("target").get<std::string>(), rec.at("provenance").get<std::string>());
    }
    if (graph.edges().size() != edge_count) fail(ErrorKind::Parse, "duplicate edge records");
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r\n") != std::string::npos) {
        fail(ErrorKind::Parse, "trailing data after edge records");
      }
    }
    return graph;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, std::string("malformed record: ") + e.what());
  }
  return KnowledgeGraph();  // unreachable
}

void save_graph(const KnowledgeGraph& graph, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "kg", "cannot write snapshot '" + path + "'");
  out << serialize_graph(graph);
  if (!out) throw Error(ErrorKind::Io, "kg", "write failure on '" + path + "'");
}

KnowledgeGraph load_graph(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "kg", "cannot read snapshot '" + path + "'");
  return parse_graph(in, path);
}

}  // namespace toolkg
