#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "oracles.hpp"
#include "toolkg/canonical.hpp"
#include "toolkg/error.hpp"
#include "toolkg/querygen.hpp"

using namespace toolkg;

namespace {

struct Scripted final : Generator {
  std::string raw;
  explicit Scripted(std::string r) : raw(std::move(r)) {}
  GeneratorResponse generate(const GeneratorRequest& request) override {
    return parse_generator_output(request.schema, raw);
  }
};

ToolSpec tool(std::string id, std::vector<ParameterSpec> params) {
  return {id, id, "tool " + id, std::move(params), {}};
}

Catalog small_catalog() {
  Catalog c;
  c.tools.push_back(tool("read_report", {{"report_id", "identifier of the report", "string"}}));
  c.tools.push_back(tool("update_report", {{"report_id", "identifier of the report", "string"},
                                           {"amount", "new amount", "number"}}));
  c.tools.push_back(tool("ping", {}));
  c.tools.push_back(tool("weather", {{"zip", "postal zone", "string"}}));
  return c;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::Io;
}

}  // namespace

TEST_SUITE("querygen") {
  TEST_CASE("class labels round-trip") {
    for (auto c : kAllQueryClasses) CHECK(parse_query_class(to_string(c)) == c);
    CHECK(parse_query_class("Explicit Multi-Step") == QueryClass::ExplicitMultiStep);
    CHECK_FALSE(is_multi_tool_class(QueryClass::SingleIntent));
  }

  TEST_CASE("P-P graph edges") {
    LocalEmbedder e;
    const auto c = small_catalog();
    const auto pp = build_pp_graph(c, e, 0.9);
    REQUIRE(pp.weight("read_report", "update_report"));
    CHECK(*pp.weight("read_report", "update_report") == doctest::Approx(1.0));
    CHECK(pp.weight("update_report", "read_report") == pp.weight("read_report", "update_report"));
    const auto zip = e.embed_one("zip postal zone");
    const auto rid = e.embed_one("report id identifier of the report");
    CHECK(oracle::dot_cosine(zip.values, rid.values) < 0.9);
    CHECK_FALSE(pp.weight("weather", "read_report"));
    for (const auto& edge : pp.edges) {
      CHECK(edge.a < edge.b);
      CHECK(edge.a != "ping");
      CHECK(edge.b != "ping");
    }
    CHECK(kind_of([&] { build_pp_graph(c, e, 0.0); }) == ErrorKind::Config);
    CHECK(kind_of([&] { build_pp_graph(c, e, 1.5); }) == ErrorKind::Config);
  }

  TEST_CASE("inferred outputs") {
    const auto c = small_catalog();
    const auto avail = available_parameters(c);
    REQUIRE(avail.size() == 3);
    Scripted two(R"([{"parameter_name":"report_id","parameter_id":"report_id","confidence_score":0.9},
                     {"parameter_name":"amount","parameter_id":"amount","confidence_score":0.7}])");
    CHECK(infer_outputs(c.tools[0], avail, two).size() == 2);
    Scripted low(R"([{"parameter_name":"amount","parameter_id":"amount","confidence_score":0.4}])");
    CHECK(infer_outputs(c.tools[0], avail, low).empty());
    Scripted none("[]");
    CHECK(infer_outputs(c.tools[0], avail, none).empty());
    Scripted stray(R"([{"parameter_name":"colour","parameter_id":"colour","confidence_score":0.9}])");
    std::vector<std::string> warnings;
    CHECK(infer_outputs(c.tools[0], avail, stray, &warnings).empty());
    CHECK(warnings.size() == 1);
    Scripted bad(R"({"oops": 1})");
    CHECK(kind_of([&] { infer_outputs(c.tools[0], avail, bad); }) == ErrorKind::GeneratorFormat);
    CHECK(kind_of([&] { infer_outputs(c.tools[0], {}, none); }) == ErrorKind::Contract);
  }

  TEST_CASE("R-P graph matches canonical parameter names") {
    Catalog c;
    c.tools.push_back(tool("a", {}));
    c.tools.push_back(tool("b", {{"report_ids", "", ""}}));
    c.tools.push_back(tool("sink", {}));
    CHECK(canonical_parameter("report_ids") == canonical_parameter("report_id"));
    const std::vector<InferredOutput> inferred = {{"a", "report_id", "report_id", 0.9, ""},
                                                  {"sink", "zzz", "zzz", 0.9, ""}};
    const auto rp = build_rp_graph(c, inferred);
    REQUIRE(rp.edges.size() == 1);
    CHECK(rp.edges[0].producer == "a");
    CHECK(rp.edges[0].consumer == "b");
    CHECK(*rp.confidence("a", "b") == doctest::Approx(0.9));
    for (const auto& e : rp.edges) {
      const auto* consumer = c.find(e.consumer);
      bool matched = false;
      for (const auto& p : consumer->parameters) matched |= canonical_parameter(p.name) == e.parameter;
      CHECK(matched);
    }
  }

  TEST_CASE("sequence verdicts") {
    const auto c = small_catalog();
    Scripted yes(R"({"is_valid": true, "explanation": "ok"})");
    Scripted no(R"({"is_valid": false, "explanation": "no"})");
    CHECK(validate_sequence(c.tools[0], c.tools[1], yes).is_valid);
    CHECK_FALSE(validate_sequence(c.tools[0], c.tools[1], no).is_valid);
    TranscriptCache empty;
    ReplayGenerator strict(empty, true);
    std::vector<std::string> warnings;
    CHECK_FALSE(validate_sequence(c.tools[0], c.tools[1], strict, &warnings).is_valid);
    CHECK_FALSE(warnings.empty());
  }

  TEST_CASE("no edges gives one chain per tool") {
    PPGraph pp;
    pp.tools = {"a", "b", "c"};
    const auto chains = enumerate_paths(pp, RPGraph{}, std::nullopt, 3, 0, 1);
    REQUIRE(chains.size() == 3);
    for (const auto& ch : chains) CHECK(ch.tools.size() == 1);
    CHECK(kind_of([&] { enumerate_paths(pp, RPGraph{}, std::nullopt, 5, 0, 1); }) == ErrorKind::Config);
  }

  TEST_CASE("path enumeration equals brute force") {
    std::mt19937_64 rng(11);
    const std::vector<std::string> names = {"a", "b", "c", "d", "e", "f"};
    for (int round = 0; round < 30; ++round) {
      PPGraph pp;
      pp.tools = names;
      RPGraph rp;
      std::set<std::pair<std::string, std::string>> arcs;
      for (std::size_t i = 0; i < names.size(); ++i) {
        for (std::size_t j = 0; j < names.size(); ++j) {
          if (i == j) continue;
          const auto roll = rng() % 10;
          if (roll == 0 && i < j) {
            pp.edges.push_back({names[i], names[j], 0.85});
            arcs.emplace(names[i], names[j]);
            arcs.emplace(names[j], names[i]);
          } else if (roll == 1) {
            rp.edges.push_back({names[i], names[j], "x", 0.5 + 0.1 * static_cast<double>(rng() % 5)});
            arcs.emplace(names[i], names[j]);
          }
        }
      }
      std::optional<PairSet> valid;
      if (round % 2) {
        PairSet keep;
        for (const auto& arc : arcs) {
          if (rng() % 3) keep.insert(arc);
        }
        arcs = keep;
        valid = keep;
      }
      const auto max_len = 1 + static_cast<std::size_t>(round % 3) + (round % 2);
      const auto got = enumerate_paths(pp, rp, valid, max_len, 0, 7);
      std::set<std::vector<std::string>> got_set;
      for (const auto& ch : got) {
        CHECK(ch.hops.size() + 1 == ch.tools.size());
        got_set.insert(ch.tools);
      }
      CHECK(got_set.size() == got.size());
      CHECK(got_set == oracle::all_paths(names, arcs, max_len));
    }
  }

  TEST_CASE("path sampling is seeded and keeps order") {
    PPGraph pp;
    pp.tools = {"a", "b", "c", "d"};
    pp.edges = {{"a", "b", 0.9}, {"b", "c", 0.9}, {"c", "d", 0.9}, {"a", "d", 0.9}};
    const auto all = enumerate_paths(pp, RPGraph{}, std::nullopt, 3, 0, 1);
    const auto s1 = enumerate_paths(pp, RPGraph{}, std::nullopt, 3, 5, 9);
    const auto s2 = enumerate_paths(pp, RPGraph{}, std::nullopt, 3, 5, 9);
    REQUIRE(s1.size() == 5);
    CHECK(s1 == s2);
    std::size_t pos = 0;
    for (const auto& ch : s1) {
      while (pos < all.size() && !(all[pos] == ch)) ++pos;
      CHECK(pos < all.size());
    }
  }

  TEST_CASE("query generation arity guard") {
    const auto c = small_catalog();
    Scripted gen(R"({"queries": []})");
    const ToolChain single{{"read_report"}, {}};
    const std::vector<QueryClass> multi = {QueryClass::MultiIntent};
    CHECK(kind_of([&] { generate_queries(single, multi, c, gen); }) == ErrorKind::IncompatibleClass);
  }

  TEST_CASE("query validation gates") {
    const auto c = load_catalog(data_path("toy_catalog.jsonl"));
    const std::map<std::pair<std::string, std::string>, bool> ok = {
        {{"query_expense_report", "update_expense_amount"}, true}};
    QueryRecord r;
    r.chain = {"query_expense_report", "update_expense_amount"};
    r.gold_tools = {r.chain.begin(), r.chain.end()};

    r.query_class = QueryClass::ImplicitMultiStep;
    r.query = "Look up expense report R1234 then change its amount to 500";
    CHECK(validate_query(r, c, nullptr, &ok).gate == ValidationGate::ClassValidation);

    r.query_class = QueryClass::ExplicitMultiStep;
    r.query = "Show me expense report {parameter} and then update the transaction amount to 500";
    CHECK(validate_query(r, c, nullptr, &ok).gate == ValidationGate::ErrorDetection);

    r.query_class = QueryClass::ConditionalMultiStep;
    r.query = "If the transaction date on expense report R1234 is before 2022-01-01, update the "
              "transaction amount to 500";
    CHECK(validate_query(r, c, nullptr, &ok).accepted());
    CHECK(validate_query(r, c, nullptr, nullptr).gate == ValidationGate::LogicalSequence);

    r.query_class = QueryClass::ExplicitMultiStep;
    r.query = "Show me report R1234 and then update the transaction amount to 500";
    r.gold_tools.insert("no_such_tool");
    CHECK(validate_query(r, c, nullptr, &ok).gate == ValidationGate::ErrorDetection);
  }

  TEST_CASE("records round-trip through JSON") {
    QueryRecord r{"q00001", "hello", QueryClass::MultiIntent, {"a", "b"}, {"a", "b"},
                  ValidationGate::ErrorDetection, "why"};
    const auto back = query_record_from_json(to_json(r));
    CHECK(back.id == r.id);
    CHECK(back.gold_tools == r.gold_tools);
    CHECK(back.flagged_gate == r.flagged_gate);
    CHECK(back.flag_reason == r.flag_reason);
  }

  TEST_CASE("dataset generation is deterministic") {
    const auto c = load_catalog(data_path("toy_catalog.jsonl"));
    LocalEmbedder e;
    TemplateGenerator g1, g2;
    QueryGenConfig cfg;
    const auto d1 = generate_dataset(c, e, g1, cfg);
    const auto d2 = generate_dataset(c, e, g2, cfg);
    CHECK(serialize_dataset(d1.records) == serialize_dataset(d2.records));
    CHECK_FALSE(d1.records.empty());
    for (const auto& r : d1.records) {
      if (!r.accepted()) continue;
      CHECK_FALSE(r.gold_tools.empty());
      for (const auto& g : r.gold_tools) CHECK(c.find(g));
    }
  }
}
