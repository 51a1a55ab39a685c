#include "toolkg/eval.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "toolkg/error.hpp"

namespace toolkg {

namespace {

constexpr const char* kModule = "eval";

using u128 = unsigned __int128;

}  // namespace

Rational::Rational(std::uint64_t n, std::uint64_t d) {
  if (d == 0) throw Error(ErrorKind::Contract, kModule, "zero denominator");
  const auto g = std::gcd(n, d);
  num = g ? n / g : 0;
  den = g ? d / g : 1;
}

bool Rational::operator<(const Rational& other) const {
  return static_cast<u128>(num) * other.den < static_cast<u128>(other.num) * den;
}

std::string Rational::percent() const {
  // round(num * 10000 / den) half up, printed as hundredths of a percent.
  const u128 scaled = static_cast<u128>(num) * 10000;
  const auto hundredths = static_cast<std::uint64_t>((scaled * 2 + den) / (static_cast<u128>(den) * 2));
  std::ostringstream out;
  out << hundredths / 100 << '.' << std::setw(2) << std::setfill('0') << hundredths % 100;
  return out.str();
}

Rational recall_at_k(const std::set<std::string>& gold, std::span<const std::string> ranked,
                     std::size_t k) {
  if (gold.empty()) throw Error(ErrorKind::Contract, kModule, "recall_at_k needs a non-empty gold set");
  if (k == 0) throw Error(ErrorKind::Contract, kModule, "k must be at least 1");
  std::set<std::string> hit;
  for (std::size_t i = 0; i < ranked.size() && i < k; ++i) {
    if (gold.contains(ranked[i])) hit.insert(ranked[i]);
  }
  return {hit.size(), gold.size()};
}

Rational complete_recall(std::span<const EvalCase> cases, Method method, std::size_t k) {
  if (cases.empty()) throw Error(ErrorKind::Contract, kModule, "complete_recall needs at least one case");
  std::uint64_t complete = 0;
  static const std::vector<std::string> kEmpty;
  for (const auto& c : cases) {
    const auto it = c.ranked.find(method);
    const auto& ranked = it == c.ranked.end() ? kEmpty : it->second;
    if (recall_at_k(c.gold, ranked, k) == Rational(1, 1)) ++complete;
  }
  return {complete, cases.size()};
}

EvalReport build_report(std::span<const EvalCase> cases, std::span<const Method> methods,
                        std::span<const std::size_t> ks) {
  EvalReport report;
  report.methods.assign(methods.begin(), methods.end());
  report.ks.assign(ks.begin(), ks.end());
  std::map<std::string, std::vector<EvalCase>> by_row;
  for (auto c : kAllQueryClasses) {
    report.rows.push_back(to_string(c));
    by_row[to_string(c)];
  }
  report.rows.push_back(kMicroAverageRow);
  for (const auto& c : cases) {
    const std::string label = to_string(c.category);
    const auto it = by_row.find(label);
    if (it == by_row.end()) throw Error(ErrorKind::Report, kModule, "unknown category '" + label + "'");
    it->second.push_back(c);
  }
  by_row[kMicroAverageRow].assign(cases.begin(), cases.end());
  for (const auto& row : report.rows) {
    const auto& row_cases = by_row[row];
    report.counts[row] = row_cases.size();
    if (row_cases.empty()) continue;
    for (auto m : methods) {
      for (auto k : ks) report.cells[{row, m, k}] = complete_recall(row_cases, m, k);
    }
  }
  return report;
}

namespace {

std::string column(Method m, std::size_t k) {
  return std::string(to_string(m)) + "@" + std::to_string(k);
}

std::string cell_text(const EvalReport& r, const std::string& row, Method m, std::size_t k) {
  const auto it = r.cells.find({row, m, k});
  return it == r.cells.end() ? "n/a" : it->second.percent();
}

}  // namespace

std::string EvalReport::to_csv() const {
  std::ostringstream out;
  out << "category,count";
  for (auto m : methods) {
    for (auto k : ks) out << ',' << column(m, k);
  }
  out << '\n';
  for (const auto& row : rows) {
    out << row << ',' << counts.at(row);
    for (auto m : methods) {
      for (auto k : ks) out << ',' << cell_text(*this, row, m, k);
    }
    out << '\n';
  }
  return out.str();
}

std::string EvalReport::to_markdown() const {
  std::vector<std::vector<std::string>> table;
  std::vector<std::string> header = {"Category", "N"};
  for (auto m : methods) {
    for (auto k : ks) header.push_back(column(m, k));
  }
  table.push_back(header);
  for (const auto& row : rows) {
    std::vector<std::string> line = {row, std::to_string(counts.at(row))};
    for (auto m : methods) {
      for (auto k : ks) line.push_back(cell_text(*this, row, m, k));
    }
    table.push_back(line);
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& line : table) {
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  }
  auto emit = [&](std::ostringstream& out, const std::vector<std::string>& line) {
    out << '|';
    for (std::size_t i = 0; i < line.size(); ++i) {
      const auto pad = std::string(width[i] - line[i].size(), ' ');
      out << ' ' << (i == 0 ? line[i] + pad : pad + line[i]) << " |";
    }
    out << '\n';
  };
  std::ostringstream out;
  out << "# CompleteRecall@k (%)\n\n";
  emit(out, table[0]);
  out << '|';
  for (std::size_t i = 0; i < width.size(); ++i) {
    // First column left-aligned, numbers right-aligned.
    out << ' ' << std::string(width[i] - (i == 0 ? 0 : 1), '-') << (i == 0 ? " |" : ": |");
  }
  out << '\n';
  for (std::size_t i = 1; i < table.size(); ++i) emit(out, table[i]);
  if (!metadata.empty()) {
    out << '\n';
    for (const auto& [key, value] : metadata) out << "- " << key << ": " << value << '\n';
  }
  return out.str();
}

std::vector<std::string> EvalReport::check_invariants() const {
  std::vector<std::string> problems;
  const Rational one(1, 1);
  for (const auto& row : rows) {
    for (auto m : methods) {
      const Rational* prev = nullptr;
      std::size_t prev_k = 0;
      for (auto k : ks) {
        const auto it = cells.find({row, m, k});
        if (it == cells.end()) continue;
        if (one < it->second) problems.push_back(row + " " + column(m, k) + " above 100%");
        if (prev && it->second < *prev) {
          problems.push_back(row + " " + to_string(m) + ": @" + std::to_string(k) + " below @" +
                             std::to_string(prev_k));
        }
        prev = &it->second;
        prev_k = k;
      }
    }
  }
  // Pooled row equals the size-weighted mean of category rows.
  for (auto m : methods) {
    for (auto k : ks) {
      const auto micro = cells.find({kMicroAverageRow, m, k});
      if (micro == cells.end()) continue;
      u128 weighted_num = 0;
      for (const auto& row : rows) {
        if (row == kMicroAverageRow) continue;
        const auto it = cells.find({row, m, k});
        if (it == cells.end()) continue;
        // cell = complete / count, so complete = cell * count exactly.
        weighted_num += static_cast<u128>(it->second.num) * counts.at(row) / it->second.den;
      }
      const Rational pooled(static_cast<std::uint64_t>(weighted_num), counts.at(kMicroAverageRow));
      if (!(pooled == micro->second)) {
        problems.push_back(std::string("micro-average ") + column(m, k) + " differs from pooled rows");
      }
    }
  }
  return problems;
}

nlohmann::json to_json(const RunRecord& record) {
  auto doc = to_json(record.result);
  doc["query_id"] = record.query_id;
  return doc;
}

RunRecord run_record_from_json(const nlohmann::json& doc) {
  RunRecord r;
  try {
    r.query_id = doc.at("query_id").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, kModule, std::string("run record without query_id: ") + e.what());
  }
  r.result = retrieval_from_json(doc);
  return r;
}

std::string serialize_run_log(std::span<const RunRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += to_json(r).dump();
    out += '\n';
  }
  return out;
}

void save_run_log(std::span<const RunRecord> records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, kModule, "cannot write " + path);
  out << serialize_run_log(records);
}

std::vector<RunRecord> load_run_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, kModule, "cannot read " + path);
  std::vector<RunRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    try {
      out.push_back(run_record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Parse, kModule, path + ": line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.kind(), kModule, path + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::vector<EvalCase> join_cases(std::span<const QueryRecord> dataset, std::span<const RunRecord> runs) {
  std::map<std::string, std::map<Method, std::vector<std::string>>> by_query;
  for (const auto& run : runs) {
    auto& slot = by_query[run.query_id][run.result.method];
    slot.clear();
    for (const auto& s : run.result.ranked_tools) {
      if (std::find(slot.begin(), slot.end(), s.id) != slot.end()) {
        throw Error(ErrorKind::Contract, kModule,
                    "run log for " + run.query_id + " lists " + s.id + " twice");
      }
      slot.push_back(s.id);
    }
  }
  std::vector<EvalCase> cases;
  for (const auto& record : dataset) {
    if (!record.accepted()) continue;
    EvalCase c;
    c.query_id = record.id;
    c.category = record.query_class;
    c.gold = record.gold_tools;
    if (const auto it = by_query.find(record.id); it != by_query.end()) c.ranked = it->second;
    cases.push_back(std::move(c));
  }
  return cases;
}

std::vector<Method> methods_in(std::span<const RunRecord> runs) {
  std::set<Method> present;
  for (const auto& r : runs) present.insert(r.result.method);
  std::vector<Method> out;
  for (auto m : kAllMethods) {
    if (present.contains(m)) out.push_back(m);
  }
  return out;
}

}  // namespace toolkg
