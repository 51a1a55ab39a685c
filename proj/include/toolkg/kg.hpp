#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "toolkg/ontology.hpp"
#include "toolkg/triple.hpp"

namespace toolkg {

using Metadata = std::map<std::string, std::string>;

inline constexpr int kGraphFormatVersion = 1;

struct Node {
  std::string id;
  std::string name;
  std::string node_type;
  Metadata metadata;  // always carries name, id, type

  bool operator==(const Node&) const = default;
};

struct Edge {
  std::string source;
  std::string predicate;
  std::string target;
  std::string provenance;

  bool operator==(const Edge&) const = default;
};

// Edges are unique on (source, predicate, target).
struct EdgeKeyLess {
  bool operator()(const Edge& a, const Edge& b) const {
    if (a.source != b.source) return a.source < b.source;
    if (a.predicate != b.predicate) return a.predicate < b.predicate;
    return a.target < b.target;
  }
};

struct EgoGraph {
  std::string center;
  std::set<std::string> members;
  std::vector<Edge> induced_edges;
};

// Node identity is (type, name); the id spells it as "type:name".
std::string make_node_id(std::string_view node_type, std::string_view name);

class KnowledgeGraph {
 public:
  explicit KnowledgeGraph(Ontology ontology = Ontology::defaults());

  const Ontology& ontology() const { return ontology_; }
  const std::map<std::string, Node, std::less<>>& nodes() const { return nodes_; }
  const std::set<Edge, EdgeKeyLess>& edges() const { return edges_; }
  const Node* node(std::string_view id) const;
  // Undirected neighbour ids; empty for unknown ids.
  const std::set<std::string>& neighbors(std::string_view id) const;
  std::vector<const Node*> nodes_named(std::string_view name) const;

  // Creates or reuses both endpoints and inserts the edge once. Re-adding an
  // existing triple changes nothing. Metadata merges key-wise; on conflicts
  // the lexicographically smaller value is kept so insertion order never
  // matters.
  void add_triple(const Triple& triple, const Metadata& subject_metadata = {},
                  const Metadata& object_metadata = {});

  const Node& add_node(std::string_view name, std::string_view node_type,
                       const Metadata& metadata = {});
  void add_edge(std::string_view source_id, std::string_view predicate,
                std::string_view target_id, std::string_view provenance);

  // FNV-1a over the snapshot serialization.
  std::string fingerprint() const;

  bool operator==(const KnowledgeGraph& other) const;

 private:
  Ontology ontology_;
  std::map<std::string, Node, std::less<>> nodes_;
  std::set<Edge, EdgeKeyLess> edges_;
  std::map<std::string, std::set<std::string>, std::less<>> adjacency_;
  std::map<std::string, std::set<std::string>, std::less<>> by_name_;
};

// Exact name lookup. Without a type, a name shared by several node types
// resolves to the first in type order.
std::optional<Node> lookup_node(const KnowledgeGraph& graph, std::string_view canonical_name,
                                std::optional<std::string_view> node_type = std::nullopt);

EgoGraph one_hop_ego(const KnowledgeGraph& graph, std::string_view node_id);

std::set<std::string> extract_tool_nodes(const EgoGraph& ego, const KnowledgeGraph& graph);

std::string serialize_graph(const KnowledgeGraph& graph);
KnowledgeGraph parse_graph(std::istream& in, const std::string& source_name);
void save_graph(const KnowledgeGraph& graph, const std::string& path);
KnowledgeGraph load_graph(const std::string& path);

}  // namespace toolkg
