#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "oracles.hpp"
#include "toolkg/error.hpp"
#include "toolkg/eval.hpp"

using namespace toolkg;

namespace {

EvalCase make_case(std::string id, QueryClass c, std::set<std::string> gold, std::vector<std::string> ranked) {
  EvalCase ec{std::move(id), c, std::move(gold), {}};
  ec.ranked[Method::Eeg] = std::move(ranked);
  return ec;
}

}  // namespace

TEST_SUITE("eval") {
  TEST_CASE("recall at k") {
    const std::vector<std::string> acb = {"a", "c", "b"};
    const std::vector<std::string> acd = {"a", "c", "d"};
    CHECK(recall_at_k({"a", "b"}, acb, 3) == Rational(1, 1));
    CHECK(recall_at_k({"a", "b"}, acd, 3) == Rational(1, 2));
    CHECK(recall_at_k({"a"}, {}, 5) == Rational(0, 1));
    CHECK(recall_at_k({"a", "b"}, acb, 2) == Rational(1, 2));
    CHECK_THROWS_AS(recall_at_k({}, acb, 3), Error);
    CHECK_THROWS_AS(recall_at_k({"a"}, acb, 0), Error);
  }

  TEST_CASE("complete recall counts whole gold sets") {
    const std::vector<EvalCase> cases = {
        make_case("1", QueryClass::MultiIntent, {"a"}, {"a"}),
        make_case("2", QueryClass::MultiIntent, {"b"}, {"b", "x"}),
        make_case("3", QueryClass::MultiIntent, {"a", "b"}, {"a", "x", "y"}),
    };
    CHECK(complete_recall(cases, Method::Eeg, 3) == Rational(2, 3));
    CHECK(complete_recall(std::span(cases).first(2), Method::Eeg, 3) == Rational(1, 1));
    CHECK_THROWS_AS(complete_recall({}, Method::Eeg, 3), Error);
  }

  TEST_CASE("rational formatting") {
    CHECK(Rational(2, 3).percent() == "66.67");
    CHECK(Rational(1, 8).percent() == "12.50");
    CHECK(Rational(1, 1).percent() == "100.00");
    CHECK(Rational(0, 7).percent() == "0.00");
    CHECK(Rational(1, 80000).percent() == "0.00");
    CHECK(Rational(1, 40000).percent() == "0.00");
    CHECK(Rational(1, 20000).percent() == "0.01");
    CHECK(Rational(4, 6) == Rational(2, 3));
    CHECK(Rational(1, 3) < Rational(1, 2));
  }

  TEST_CASE("micro-average pools cases") {
    std::vector<EvalCase> cases;
    for (int i = 0; i < 10; ++i) cases.push_back(make_case("s" + std::to_string(i), QueryClass::SingleIntent, {"a"}, {"a"}));
    for (int i = 0; i < 30; ++i) {
      cases.push_back(make_case("m" + std::to_string(i), QueryClass::MultiIntent, {"a", "b"},
                                i % 2 ? std::vector<std::string>{"a", "b"} : std::vector<std::string>{"a"}));
    }
    const std::vector<Method> methods = {Method::Eeg};
    const auto report = build_report(cases, methods);
    CHECK(report.cells.at({kMicroAverageRow, Method::Eeg, 10}) == Rational(5, 8));
    CHECK(report.cells.at({"single-intent", Method::Eeg, 10}) == Rational(1, 1));
    CHECK(report.cells.at({"multi-intent", Method::Eeg, 10}) == Rational(1, 2));
    CHECK_FALSE(report.cells.contains({"ir-multi-intent", Method::Eeg, 10}));
    CHECK(report.check_invariants().empty());
  }

  TEST_CASE("single category equals micro-average") {
    std::vector<EvalCase> cases = {make_case("1", QueryClass::ExplicitMultiStep, {"a", "b"}, {"b", "q", "a"}),
                                   make_case("2", QueryClass::ExplicitMultiStep, {"a"}, {"z"})};
    const std::vector<Method> methods = {Method::Eeg};
    const auto report = build_report(cases, methods);
    for (auto k : kReportKs) {
      CHECK(report.cells.at({"explicit-multi-step", Method::Eeg, k}) ==
            report.cells.at({kMicroAverageRow, Method::Eeg, k}));
    }
  }

  TEST_CASE("randomized cases agree with the naive count") {
    std::mt19937_64 rng(21);
    std::vector<EvalCase> cases;
    std::vector<std::set<std::string>> golds;
    std::vector<std::vector<std::string>> ranked;
    for (int i = 0; i < 300; ++i) {
      std::set<std::string> gold;
      const auto g = 1 + rng() % 3;
      while (gold.size() < g) gold.insert("t" + std::to_string(rng() % 15));
      std::vector<std::string> r;
      for (int j = 0; j < 15; ++j) r.push_back("t" + std::to_string(j));
      std::shuffle(r.begin(), r.end(), rng);
      r.resize(rng() % 12);
      cases.push_back(make_case(std::to_string(i), kAllQueryClasses[rng() % 6], gold, r));
      golds.push_back(gold);
      ranked.push_back(r);
    }
    for (std::size_t k : {1, 3, 5, 10}) {
      const auto [hit, total] = oracle::complete_recall(golds, ranked, k);
      const auto g = oracle::gcd(hit, total);
      CHECK(complete_recall(cases, Method::Eeg, k) ==
            Rational(static_cast<std::uint64_t>(hit / g), static_cast<std::uint64_t>(total / g)));
    }
  }

  TEST_CASE("report shape and invariants") {
    const auto dataset = load_dataset(data_path("toy_eval/dataset.jsonl"));
    const auto runs = load_run_log(data_path("toy_eval/runs.jsonl"));
    const auto cases = join_cases(dataset, runs);
    CHECK(cases.size() == 10);
    const auto methods = methods_in(runs);
    REQUIRE(methods.size() == 4);
    const auto report = build_report(cases, methods);
    REQUIRE(report.rows.size() == 7);
    CHECK(report.rows.back() == kMicroAverageRow);
    CHECK(report.check_invariants().empty());

    EvalReport broken = report;
    broken.cells[{"single-intent", Method::Eeg, 3}] = Rational(1, 1);
    broken.cells[{"single-intent", Method::Eeg, 5}] = Rational(0, 1);
    CHECK_FALSE(broken.check_invariants().empty());
  }

  TEST_CASE("toy report matches the golden files") {
    const auto dataset = load_dataset(data_path("toy_eval/dataset.jsonl"));
    const auto runs = load_run_log(data_path("toy_eval/runs.jsonl"));
    const auto report = build_report(join_cases(dataset, runs), methods_in(runs));
    CHECK(report.to_csv() == read_text(data_path("toy_eval/report.csv")));
    CHECK(report.to_markdown() == read_text(data_path("toy_eval/report.md")));
  }

  TEST_CASE("duplicate ids in a ranking are refused") {
    std::vector<QueryRecord> ds(1);
    ds[0].id = "q1";
    ds[0].query = "x";
    ds[0].gold_tools = {"a"};
    RunRecord run{"q1", {}};
    run.result.ranked_tools = {{"a", 1.0}, {"a", 0.5}};
    const std::vector<RunRecord> runs = {run};
    CHECK_THROWS_AS(join_cases(ds, runs), Error);
  }
}
