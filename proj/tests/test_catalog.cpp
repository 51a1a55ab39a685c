#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "toolkg/catalog.hpp"
#include "toolkg/error.hpp"

using namespace toolkg;

TEST_SUITE("catalog") {
  TEST_CASE("the reminder tool loads with its two parameters") {
    const auto catalog = load_catalog(data_path("reminder_tool.jsonl"));
    REQUIRE(catalog.tools.size() == 1);
    const auto& t = catalog.tools[0];
    REQUIRE(t.parameters.size() == 2);
    CHECK(t.parameters[0].name == "priority_filter");
    CHECK(t.parameters[1].name == "recipient_list");
    CHECK(validate_tool(t, Ontology::defaults()).empty());
  }

  TEST_CASE("empty file gives an empty catalog") {
    std::istringstream in("\n\n");
    CHECK(parse_catalog(in, "empty").tools.empty());
  }

  TEST_CASE("duplicate tool ids are rejected by name") {
    std::istringstream in(R"({"tool_id":"t1","title":"A"}
{"tool_id":"t1","title":"B"}
)");
    try {
      parse_catalog(in, "dup");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Validation);
      CHECK(std::string(e.what()).find("'t1'") != std::string::npos);
    }
  }

  TEST_CASE("malformed record names the line") {
    std::istringstream in("{\"tool_id\":\"a\",\"title\":\"A\"}\n{not json\n");
    try {
      parse_catalog(in, "bad");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Parse);
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }

  TEST_CASE("validate_tool reports field-level issues") {
    ToolSpec t{"x", "", "d", {}, {}};
    auto issues = validate_tool(t, Ontology::defaults());
    REQUIRE(issues.size() == 1);
    CHECK(issues[0].field == "title");

    ToolSpec g{"x", "X", "d", {}, {{"galaxy", "milky way"}}};
    issues = validate_tool(g, Ontology::defaults());
    REQUIRE(issues.size() == 1);
    CHECK(issues[0].field.find("galaxy") != std::string::npos);

    ToolSpec p{"x", "X", "d", {{"a", "", ""}, {"a", "", ""}}, {}};
    CHECK(validate_tool(p, Ontology::defaults()).size() == 1);
  }

  TEST_CASE("serialize and parse round-trip") {
    const auto catalog = load_catalog(data_path("toy_catalog.jsonl"));
    std::istringstream in(serialize_catalog(catalog));
    CHECK(parse_catalog(in, "rt") == catalog);
  }

  TEST_CASE("metadata values split on semicolons") {
    CHECK(split_metadata_values(" a; b ;;c") == std::vector<std::string>{"a", "b", "c"});
  }
}
