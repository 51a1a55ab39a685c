#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "toolkg/querygen.hpp"
#include "toolkg/retrieval.hpp"

namespace toolkg {

// Non-negative fraction kept in lowest terms.
struct Rational {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  Rational() = default;
  Rational(std::uint64_t n, std::uint64_t d);

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Rational& other) const = default;
  bool operator<(const Rational& other) const;
  bool operator<=(const Rational& other) const { return !(other < *this); }
  // Percentage with two decimals, rounded half up, e.g. "66.67".
  std::string percent() const;
};

// |gold ∩ top-k(ranked)| / |gold|.
Rational recall_at_k(const std::set<std::string>& gold, std::span<const std::string> ranked,
                     std::size_t k);

struct EvalCase {
  std::string query_id;
  QueryClass category = QueryClass::SingleIntent;
  std::set<std::string> gold;
  std::map<Method, std::vector<std::string>> ranked;
};

// Share of cases whose whole gold set is inside the top k.
Rational complete_recall(std::span<const EvalCase> cases, Method method, std::size_t k);

inline constexpr std::size_t kReportKs[] = {3, 5, 10};
inline constexpr const char* kMicroAverageRow = "micro-average";

struct EvalReport {
  std::vector<std::string> rows;  // six categories then micro-average
  std::vector<Method> methods;
  std::vector<std::size_t> ks;
  // (row, method, k) -> value; missing when the row has no cases.
  std::map<std::tuple<std::string, Method, std::size_t>, Rational> cells;
  std::map<std::string, std::size_t> counts;
  std::map<std::string, std::string> metadata;

  std::string to_csv() const;
  std::string to_markdown() const;
  // Empty when every invariant holds.
  std::vector<std::string> check_invariants() const;
};

EvalReport build_report(std::span<const EvalCase> cases, std::span<const Method> methods,
                        std::span<const std::size_t> ks = kReportKs);

struct RunRecord {
  std::string query_id;
  RetrievalResult result;
};

nlohmann::json to_json(const RunRecord& record);
RunRecord run_record_from_json(const nlohmann::json& doc);
std::string serialize_run_log(std::span<const RunRecord> records);
void save_run_log(std::span<const RunRecord> records, const std::string& path);
std::vector<RunRecord> load_run_log(const std::string& path);

// Accepted dataset records joined with their run-log entries by query id.
// Methods without an entry for a query count as empty rankings.
std::vector<EvalCase> join_cases(std::span<const QueryRecord> dataset, std::span<const RunRecord> runs);

// Methods present in the run log, in report column order.
std::vector<Method> methods_in(std::span<const RunRecord> runs);

}  // namespace toolkg
