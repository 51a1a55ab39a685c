#include <doctest.h>

#include <algorithm>

#include "helpers.hpp"
#include "toolkg/canonical.hpp"
#include "toolkg/error.hpp"
#include "toolkg/extraction.hpp"

using namespace toolkg;

namespace {

struct Fixed final : Generator {
  std::string raw;
  explicit Fixed(std::string r) : raw(std::move(r)) {}
  GeneratorResponse generate(const GeneratorRequest& request) override {
    return parse_generator_output(request.schema, raw);
  }
};

struct Failing final : Generator {
  GeneratorResponse generate(const GeneratorRequest&) override {
    throw Error(ErrorKind::Provider, "providers", "down");
  }
};

bool has(const std::vector<RawTriple>& ts, const std::string& p, const std::string& tail) {
  return std::any_of(ts.begin(), ts.end(), [&](const RawTriple& t) {
    return t.relationship == p && t.tail == tail;
  });
}

ToolSpec reminder_tool() { return load_catalog(data_path("reminder_tool.jsonl")).tools.at(0); }

}  // namespace

TEST_SUITE("extraction") {
  TEST_CASE("default rules cover parameters and metadata") {
    const auto ts = default_triples(reminder_tool(), Ontology::defaults());
    CHECK(has(ts, "has_parameter", "priority_filter"));
    CHECK(has(ts, "has_parameter", "recipient_list"));
    CHECK(has(ts, "has_department", "Operations"));
    CHECK(ts.front().head == "Send Task Deadline Reminder to Team Members");
    CHECK(default_triples(ToolSpec{"e", "Empty", "", {}, {}}, Ontology::defaults()).empty());
  }

  TEST_CASE("open extraction filters and dedupes") {
    const ToolSpec tool{"err", "Error Reporting", "Reports errors to finance.", {}, {}};
    Fixed gen(R"({"relationships":[
      {"head":"Error Reporting","relationship":"has_line_of_business","tail":"Finance"},
      {"head":"Error Reporting","relationship":"has_line_of_business","tail":"Finance"},
      {"head":"Error Reporting","relationship":"galaxy_of","tail":"Stars"},
      {"head":"Error","relationship":"related_to","tail":"errors"}]})");
    const auto ts = extract_triples(tool, Ontology::defaults(), gen);
    REQUIRE(ts.size() == 1);
    CHECK(ts[0].tail == "Finance");
    CHECK(ts[0].origin == TripleOrigin::Llm);

    Fixed empty(R"({"relationships":[]})");
    CHECK(extract_triples(tool, Ontology::defaults(), empty).empty());
  }

  TEST_CASE("canonicalization types and filters triples") {
    const auto tool = reminder_tool();
    const auto defaults = default_triples(tool, Ontology::defaults());
    auto c = canonicalize_triples(defaults, tool, Ontology::defaults(), SynonymTable::defaults());
    CHECK(c.triples.size() == defaults.size());
    for (const auto& t : c.triples) CHECK(t.subject_type == "tool");

    std::vector<RawTriple> raw = {
        {"Task", "categorized_by", "Priority Level", tool.tool_id, TripleOrigin::Llm},
        {"Task", "galaxy_of", "Stars", tool.tool_id, TripleOrigin::Llm},
    };
    c = canonicalize_triples(raw, tool, Ontology::defaults(), SynonymTable::defaults());
    REQUIRE(c.triples.size() == 1);
    CHECK(c.triples[0].subject == "task");
    CHECK(c.triples[0].object == "priority level");
    CHECK(c.triples[0].subject_type == "business_object");
    CHECK(c.triples[0].object_type == "business_object");
    CHECK(c.discards.out_of_ontology == 1);
  }

  TEST_CASE("rule-only build has one node per tool and per parameter name") {
    const auto catalog = load_catalog(data_path("toy_catalog.jsonl"));
    const auto built = build_graph(catalog, Ontology::defaults(), SynonymTable::defaults());
    std::size_t tools = 0, params = 0;
    for (const auto& [id, n] : built.graph.nodes()) {
      tools += n.node_type == "tool";
      params += n.node_type == "parameter";
    }
    std::set<std::string> names;
    for (const auto& t : catalog.tools) {
      for (const auto& p : t.parameters) names.insert(canonicalize_entity(p.name));
    }
    CHECK(tools == catalog.tools.size());
    CHECK(params == names.size());
  }

  TEST_CASE("reminder tool alone links to both parameters") {
    Catalog catalog;
    catalog.tools.push_back(reminder_tool());
    const auto built = build_graph(catalog, Ontology::defaults(), SynonymTable::defaults());
    const auto tool_id = make_node_id("tool", canonicalize_entity(catalog.tools[0].title));
    const auto& nb = built.graph.neighbors(tool_id);
    CHECK(nb.contains(make_node_id("parameter", "priority_filter")));
    CHECK(nb.contains(make_node_id("parameter", "recipient_list")));
    CHECK(nb.contains(make_node_id("department", "operation")));
  }

  TEST_CASE("builds are byte-identical and survive provider failures") {
    const auto catalog = load_catalog(data_path("toy_catalog.jsonl"));
    TemplateGenerator g1, g2;
    const auto a = build_graph(catalog, Ontology::defaults(), SynonymTable::defaults(), &g1);
    const auto b = build_graph(catalog, Ontology::defaults(), SynonymTable::defaults(), &g2);
    CHECK(serialize_graph(a.graph) == serialize_graph(b.graph));

    Failing broken;
    const auto c = build_graph(catalog, Ontology::defaults(), SynonymTable::defaults(), &broken);
    CHECK(c.report.tools.size() == catalog.tools.size());
    CHECK(c.report.tools[0].extraction_skipped);
    const auto rules = build_graph(catalog, Ontology::defaults(), SynonymTable::defaults());
    CHECK(serialize_graph(c.graph) == serialize_graph(rules.graph));
  }
}
