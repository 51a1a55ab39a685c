#include <doctest.h>

#include <random>
#include <sstream>

#include "helpers.hpp"
#include "oracles.hpp"
#include "toolkg/error.hpp"
#include "toolkg/kg.hpp"

using namespace toolkg;

namespace {

Triple triple(std::string s, std::string st, std::string p, std::string o, std::string ot) {
  return Triple{std::move(s), std::move(st), std::move(p), std::move(o), std::move(ot), "t1",
                TripleOrigin::DefaultRule};
}

// Random graph over n business objects with edges drawn at probability p.
KnowledgeGraph random_graph(std::mt19937_64& rng, int n, double p, std::vector<std::pair<int, int>>& edges) {
  KnowledgeGraph g;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int i = 0; i < n; ++i) g.add_node("n" + std::to_string(i), i % 3 == 0 ? "tool" : "business_object");
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (coin(rng) >= p) continue;
      const bool flip = rng() & 1;
      const int a = flip ? j : i, b = flip ? i : j;
      g.add_edge(make_node_id(a % 3 == 0 ? "tool" : "business_object", "n" + std::to_string(a)),
                 "related_to",
                 make_node_id(b % 3 == 0 ? "tool" : "business_object", "n" + std::to_string(b)), "t");
      edges.emplace_back(i, j);
    }
  }
  return g;
}

std::string id_of(int i) {
  return make_node_id(i % 3 == 0 ? "tool" : "business_object", "n" + std::to_string(i));
}

}  // namespace

TEST_SUITE("kg") {
  TEST_CASE("one triple makes two nodes and one edge") {
    KnowledgeGraph g;
    const auto t = triple("send task deadline reminder to team member", "tool", "has_parameter",
                          "priority_filter", "parameter");
    g.add_triple(t);
    CHECK(g.nodes().size() == 2);
    CHECK(g.edges().size() == 1);
    const auto fp = g.fingerprint();
    g.add_triple(t);
    CHECK(g.fingerprint() == fp);
  }

  TEST_CASE("self-loops and unknown predicates are rejected") {
    KnowledgeGraph g;
    try {
      g.add_triple(triple("task", "business_object", "categorized_by", "task", "business_object"));
      FAIL("expected self-loop error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::SelfLoop);
    }
    CHECK_THROWS_AS(g.add_triple(triple("a", "tool", "galaxy_of", "b", "parameter")), Error);
    CHECK(g.nodes().empty());
  }

  TEST_CASE("insertion order does not change the snapshot") {
    std::vector<Triple> ts = {
        triple("a", "tool", "has_parameter", "x", "parameter"),
        triple("b", "tool", "has_parameter", "x", "parameter"),
        triple("a", "tool", "has_capability", "search", "capability"),
    };
    KnowledgeGraph g1, g2;
    for (const auto& t : ts) g1.add_triple(t, {{"k", "1"}});
    for (auto it = ts.rbegin(); it != ts.rend(); ++it) g2.add_triple(*it, {{"k", "1"}});
    CHECK(serialize_graph(g1) == serialize_graph(g2));
  }

  TEST_CASE("lookup by canonical name") {
    KnowledgeGraph g;
    g.add_triple(triple("read purchase order item", "tool", "has_business_object", "purchase order item",
                        "business_object"));
    g.add_triple(triple("query supplier", "tool", "has_business_object", "supplier", "business_object"));
    const auto n = lookup_node(g, "purchase order item");
    REQUIRE(n);
    CHECK(n->node_type == "business_object");
    CHECK_FALSE(lookup_node(g, "galaxy"));
    CHECK(lookup_node(g, "supplier", "business_object"));
    CHECK_FALSE(lookup_node(g, "supplier", "tool"));
  }

  TEST_CASE("ego graphs: isolated, star, tool extraction") {
    KnowledgeGraph g;
    g.add_node("lonely", "business_object");
    auto ego = one_hop_ego(g, make_node_id("business_object", "lonely"));
    CHECK(ego.members == std::set<std::string>{make_node_id("business_object", "lonely")});
    CHECK(extract_tool_nodes(ego, g).empty());

    g.add_node("solo tool", "tool");
    ego = one_hop_ego(g, make_node_id("tool", "solo tool"));
    CHECK(extract_tool_nodes(ego, g) == std::set<std::string>{make_node_id("tool", "solo tool")});

    for (const char* leaf : {"a", "b", "d"}) {
      g.add_triple(triple(leaf, "tool", "has_business_object", "c", "business_object"));
    }
    ego = one_hop_ego(g, make_node_id("business_object", "c"));
    CHECK(ego.members.size() == 4);
    CHECK(ego.induced_edges.size() == 3);
    CHECK(extract_tool_nodes(ego, g).size() == 3);
    CHECK_THROWS_AS(one_hop_ego(g, "tool:missing"), Error);
  }

  TEST_CASE("ego equals depth-1 BFS on random graphs") {
    std::mt19937_64 rng(11);
    for (int round = 0; round < 20; ++round) {
      std::vector<std::pair<int, int>> edges;
      const int n = 30;
      const auto g = random_graph(rng, n, 0.1, edges);
      for (int v = 0; v < n; ++v) {
        std::set<std::string> expected;
        for (int m : oracle::bfs_depth1(n, edges, v)) expected.insert(id_of(m));
        CHECK(one_hop_ego(g, id_of(v)).members == expected);
      }
    }
  }

  TEST_CASE("snapshot round-trip, including a 1000-node graph") {
    std::mt19937_64 rng(5);
    std::vector<std::pair<int, int>> edges;
    const auto g = random_graph(rng, 1000, 0.002, edges);
    std::istringstream in(serialize_graph(g));
    const auto back = parse_graph(in, "rt");
    CHECK(back == g);
    // Structural oracle: sorted node ids and edge triples.
    std::vector<std::string> a, b;
    for (const auto& [id, n] : g.nodes()) a.push_back(id);
    for (const auto& [id, n] : back.nodes()) b.push_back(id);
    CHECK(a == b);
    CHECK(back.edges().size() == edges.size());
  }

  TEST_CASE("truncated or mismatched snapshots fail") {
    KnowledgeGraph g;
    g.add_triple(triple("a", "tool", "has_parameter", "x", "parameter"));
    const auto text = serialize_graph(g);
    std::istringstream truncated(text.substr(0, text.rfind('\n', text.size() - 2) + 1));
    try {
      parse_graph(truncated, "cut");
      FAIL("expected parse error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Parse);
    }
    auto bumped = text;
    bumped.replace(bumped.find("\"format_version\":1"), 18, "\"format_version\":9");
    std::istringstream future(bumped);
    try {
      parse_graph(future, "future");
      FAIL("expected version error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Version);
    }
  }

  TEST_CASE("save and load through a file") {
    const auto dir = scratch_dir("kg");
    KnowledgeGraph g;
    g.add_triple(triple("a", "tool", "has_parameter", "x", "parameter"), {{"tool_id", "a1"}});
    save_graph(g, (dir / "g.jsonl").string());
    CHECK(load_graph((dir / "g.jsonl").string()) == g);
    CHECK_THROWS_AS(load_graph((dir / "missing.jsonl").string()), Error);
  }
}
