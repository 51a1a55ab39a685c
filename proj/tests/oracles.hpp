#pragma once
// Independent reference implementations used as test oracles. Nothing here
// calls into the library under test.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

// Depth-1 BFS over an undirected edge list.
inline std::set<int> bfs_depth1(int n, const std::vector<std::pair<int, int>>& edges, int start) {
  std::vector<std::vector<int>> adj(n);
  for (auto [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  std::set<int> seen{start};
  std::vector<int> frontier{start};
  std::vector<int> next;
  for (int depth = 0; depth < 1; ++depth) {
    for (int u : frontier) {
      for (int v : adj[u]) {
        if (seen.insert(v).second) next.push_back(v);
      }
    }
    frontier.swap(next);
    next.clear();
  }
  return seen;
}

inline double dot_cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0 || nb == 0) return 0;
  return dot / std::sqrt(na * nb);
}

inline std::vector<std::string> ascii_words(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// Okapi BM25 written out term by term.
inline std::map<std::string, double> bm25(const std::vector<std::pair<std::string, std::string>>& docs,
                                          const std::string& query, double k1 = 1.5, double b = 0.75) {
  const double n = static_cast<double>(docs.size());
  std::vector<std::vector<std::string>> toks;
  double total = 0;
  for (const auto& d : docs) {
    toks.push_back(ascii_words(d.second));
    total += static_cast<double>(toks.back().size());
  }
  const double avgdl = total / n;
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    double score = 0;
    for (const auto& t : ascii_words(query)) {
      double df = 0;
      for (const auto& d : toks) {
        if (std::find(d.begin(), d.end(), t) != d.end()) df += 1;
      }
      const double idf = std::log(1.0 + (n - df + 0.5) / (df + 0.5));
      const double tf = static_cast<double>(std::count(toks[i].begin(), toks[i].end(), t));
      const double len = static_cast<double>(toks[i].size());
      score += idf * tf * (k1 + 1) / (tf + k1 * (1 - b + b * len / avgdl));
    }
    if (score > 0) out[docs[i].first] = score;
  }
  return out;
}

// Every ordered sequence of distinct nodes (length 1..max_len) whose
// consecutive pairs are arcs, found by trying all permutations of subsets.
inline std::set<std::vector<std::string>> all_paths(const std::vector<std::string>& nodes,
                                                    const std::set<std::pair<std::string, std::string>>& arcs,
                                                    std::size_t max_len) {
  std::set<std::vector<std::string>> out;
  const std::size_t n = nodes.size();
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<std::string> subset;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (1u << i)) subset.push_back(nodes[i]);
    }
    if (subset.size() > max_len) continue;
    std::sort(subset.begin(), subset.end());
    do {
      bool ok = true;
      for (std::size_t i = 0; i + 1 < subset.size(); ++i) {
        if (!arcs.contains({subset[i], subset[i + 1]})) ok = false;
      }
      if (ok) out.insert(subset);
    } while (std::next_permutation(subset.begin(), subset.end()));
  }
  return out;
}

// Counts complete cases with floating point; fine for the sizes used.
inline std::pair<long, long> complete_recall(const std::vector<std::set<std::string>>& golds,
                                             const std::vector<std::vector<std::string>>& ranked,
                                             std::size_t k) {
  long complete = 0;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    std::size_t found = 0;
    for (const auto& g : golds[i]) {
      for (std::size_t j = 0; j < std::min(k, ranked[i].size()); ++j) {
        if (ranked[i][j] == g) {
          ++found;
          break;
        }
      }
    }
    if (found == golds[i].size()) ++complete;
  }
  return {complete, static_cast<long>(golds.size())};
}

inline long gcd(long a, long b) { return b == 0 ? a : gcd(b, a % b); }

}  // namespace oracle
