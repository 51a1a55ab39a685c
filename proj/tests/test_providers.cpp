#include <doctest.h>

#include "helpers.hpp"
#include "oracles.hpp"
#include "toolkg/error.hpp"
#include "toolkg/providers.hpp"

using namespace toolkg;

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Feature hashing written out by hand for already-canonical lowercase tokens.
std::vector<double> hashed(const std::vector<std::string>& tokens, std::size_t dim, std::uint64_t seed) {
  std::vector<double> v(dim, 0.0);
  for (const auto& t : tokens) {
    std::uint64_t h = mix(seed);
    for (unsigned char c : t) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    v[h % dim] += (mix(h) & 1) ? -1.0 : 1.0;
  }
  return v;
}

struct Scripted final : Generator {
  std::string raw;
  int calls = 0;
  GeneratorResponse generate(const GeneratorRequest& request) override {
    ++calls;
    return parse_generator_output(request.schema, raw);
  }
};

}  // namespace

TEST_SUITE("providers") {
  TEST_CASE("local embedding is a bag of tokens") {
    const auto a = local_embed("purchase order", 256, 42);
    const auto b = local_embed("order purchase", 256, 42);
    CHECK(a == b);
    CHECK(cosine(a, b) == 1.0);
    CHECK(local_embed("purchase order", 256, 42) != local_embed("purchase order", 256, 43));
    CHECK_THROWS_AS(local_embed("  ,, ", 256, 42), Error);
  }

  TEST_CASE("local embedding matches the hand-written hash") {
    const auto x = local_embed("purchase order", 256, 42);
    const auto y = local_embed("purchase order item", 256, 42);
    const auto ox = hashed({"purchase", "order"}, 256, 42);
    const auto oy = hashed({"purchase", "order", "item"}, 256, 42);
    const double expected = oracle::dot_cosine(ox, oy);
    CHECK(cosine(x, y) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(cosine(x, y) > 0.0);
    CHECK(cosine(x, y) < 1.0);
  }

  TEST_CASE("cosine contract") {
    CHECK_THROWS_AS(cosine(Embedding{{1, 0}}, Embedding{{1, 0, 0}}), Error);
    CHECK(cosine(Embedding{{0, 0}}, Embedding{{1, 0}}) == 0.0);
  }

  TEST_CASE("local reranker orders by cosine with id tie-break") {
    LocalReranker r;
    std::vector<RerankCandidate> one = {{"only", "anything"}};
    CHECK(r.rerank("query", one).front().candidate_ref == "only");

    std::vector<RerankCandidate> cands = {{"b", "weather forecast"}, {"a", "read purchase order"}};
    const auto s = r.rerank("read purchase order", cands);
    CHECK(s.front().candidate_ref == "a");

    std::vector<RerankCandidate> tied = {{"z", "same text"}, {"y", "same text"}, {"x", "other words"}};
    const auto t = r.rerank("same text", tied);
    CHECK(t[0].candidate_ref == "y");
    CHECK(t[1].candidate_ref == "z");
  }

  TEST_CASE("schema validation") {
    CHECK_THROWS_AS(parse_generator_output(SchemaTag::OutputParameters,
                                           R"([{"parameter_name":"a","parameter_id":"a","confidence_score":1.7}])"),
                    Error);
    CHECK_THROWS_AS(parse_generator_output(SchemaTag::Triples, "not json"), Error);
    const auto fenced = parse_generator_output(SchemaTag::SequenceVerdict,
                                               "```json\n{\"is_valid\": true}\n```");
    CHECK(fenced.parsed["is_valid"] == true);
  }

  TEST_CASE("replay generator: lenient canned minimum, strict cache miss") {
    TranscriptCache cache;
    GeneratorRequest req{"prompt", SchemaTag::Triples, "tool-1", {}};
    ReplayGenerator lenient(cache, false);
    CHECK(lenient.generate(req).parsed == nlohmann::json{{"relationships", nlohmann::json::array()}});
    ReplayGenerator strict(cache, true);
    try {
      strict.generate(req);
      FAIL("expected cache miss");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::CacheMiss);
    }
  }

  TEST_CASE("recording then replaying gives the same answers") {
    const auto dir = scratch_dir("providers");
    Scripted inner;
    inner.raw = R"({"relationships":[{"head":"A","relationship":"part_of","tail":"B"}]})";
    TranscriptCache cache;
    RecordingGenerator rec(inner, cache);
    GeneratorRequest req{"prompt text", SchemaTag::Triples, "tool-1", {}};
    const auto first = rec.generate(req);
    cache.save((dir / "t.jsonl").string());

    const auto loaded = TranscriptCache::load((dir / "t.jsonl").string());
    CHECK(loaded.size() == 1);
    ReplayGenerator replay(loaded, true);
    CHECK(replay.generate(req).parsed == first.parsed);
    CHECK(transcript_key(req) != transcript_key(GeneratorRequest{"other", SchemaTag::Triples, "tool-1", {}}));
  }

  TEST_CASE("template generator is deterministic") {
    TemplateGenerator g1(42), g2(42);
    GeneratorRequest req;
    req.schema = SchemaTag::QueryBundle;
    req.context = {{"chain",
                    {{{"tool_id", "read_x"}, {"title", "Read Expense Report"}, {"description", ""},
                      {"parameters", {{{"name", "report_id"}, {"description", ""}, {"value_type", "string"}}}}}}},
                   {"classes", {"single-intent"}}};
    CHECK(g1.generate(req).raw == g2.generate(req).raw);
  }
}
