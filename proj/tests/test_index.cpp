#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "oracles.hpp"
#include "toolkg/error.hpp"
#include "toolkg/extraction.hpp"
#include "toolkg/index.hpp"

using namespace toolkg;

TEST_SUITE("index") {
  TEST_CASE("top-k semantic equals brute force") {
    LocalEmbedder embedder;
    const auto catalog = load_catalog(data_path("toy_catalog.jsonl"));
    const auto index = build_tool_index(catalog, embedder);
    const auto q = embedder.embed_one("show purchase order item details");
    std::vector<std::pair<double, std::string>> brute;
    for (const auto& e : index.entries) {
      brute.emplace_back(-oracle::dot_cosine(q.values, e.embedding.values), e.id);
    }
    std::sort(brute.begin(), brute.end());
    const auto top = top_k_semantic(index, q, 5);
    REQUIRE(top.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(top[i].id == brute[i].second);
      CHECK(top[i].score == doctest::Approx(-brute[i].first).epsilon(1e-12));
    }
    CHECK(top_k_semantic(index, q, 100).size() == catalog.tools.size());
  }

  TEST_CASE("index save/load keeps fingerprint") {
    LocalEmbedder embedder;
    const auto catalog = load_catalog(data_path("toy_catalog.jsonl"));
    const auto built = build_graph(catalog, Ontology::defaults(), SynonymTable::defaults());
    const auto index = build_embedding_index(built.graph, embedder);
    CHECK(index.source_fingerprint == built.graph.fingerprint());
    const auto dir = scratch_dir("index");
    save_embedding_index(index, (dir / "i.jsonl").string());
    const auto back = load_embedding_index((dir / "i.jsonl").string());
    CHECK(back.fingerprint() == index.fingerprint());
    CHECK(back.entries.size() == index.entries.size());
    CHECK(back.entries[3].embedding == index.entries[3].embedding);
  }

  TEST_CASE("n-gram matching finds whole node names") {
    KnowledgeGraph g;
    for (const char* n : {"purchase order item", "purchase order", "detail", "item"}) {
      g.add_node(n, "business_object");
    }
    g.add_node("the", "business_object");
    const auto index = build_ngram_index(g);
    const auto hits = match_ngrams(index, "Show me the details of all purchase order items");
    CHECK(hits.contains(make_node_id("business_object", "purchase order item")));
    CHECK(hits.contains(make_node_id("business_object", "purchase order")));
    CHECK(hits.contains(make_node_id("business_object", "detail")));
    CHECK(hits.contains(make_node_id("business_object", "item")));
    CHECK_FALSE(hits.contains(make_node_id("business_object", "the")));
    CHECK(match_ngrams(index, "nothing relevant").empty());
  }

  TEST_CASE("BM25 matches the scalar formula on the committed corpus") {
    const auto catalog = load_catalog(data_path("bm25_corpus.jsonl"));
    Bm25Config cfg;
    cfg.fields = FieldMode::DescriptionOnly;
    const auto index = build_bm25_index(catalog, cfg);
    std::vector<std::pair<std::string, std::string>> docs;
    for (const auto& t : catalog.tools) docs.emplace_back(t.tool_id, t.description);
    for (const char* q : {"purchase order", "send reminder team", "approve purchase requisition item",
                          "supplier name name", "unmatched"}) {
      const auto expected = oracle::bm25(docs, q);
      const auto got = index.search(q);
      CHECK(got.size() == expected.size());
      for (const auto& s : got) {
        REQUIRE(expected.contains(s.id));
        CHECK(std::abs(s.score - expected.at(s.id)) < 1e-9);
      }
    }
  }

  TEST_CASE("BM25 field modes and tokenizers") {
    const auto catalog = load_catalog(data_path("bm25_corpus.jsonl"));
    const auto titled = build_bm25_index(catalog);
    CHECK(titled.document_frequency("read") == 1);
    Bm25Config desc_only;
    desc_only.fields = FieldMode::DescriptionOnly;
    CHECK(build_bm25_index(catalog, desc_only).document_frequency("read") == 0);
    Bm25Config lemma;
    lemma.tokenizer = TokenizerMode::Lemma;
    CHECK(build_bm25_index(catalog, lemma).document_frequency("detail") == 1);
    CHECK(titled.document_frequency("detail") == 0);
  }
}
