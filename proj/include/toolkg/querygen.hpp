#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "toolkg/catalog.hpp"
#include "toolkg/providers.hpp"

namespace toolkg {

enum class QueryClass {
  ConditionalMultiStep,
  ExplicitMultiStep,
  ImplicitMultiStep,
  IrMultiIntent,
  MultiIntent,
  SingleIntent,
};

// Report row order.
inline constexpr QueryClass kAllQueryClasses[] = {
    QueryClass::ConditionalMultiStep, QueryClass::ExplicitMultiStep, QueryClass::ImplicitMultiStep,
    QueryClass::IrMultiIntent,        QueryClass::MultiIntent,       QueryClass::SingleIntent,
};

const char* to_string(QueryClass c);
// Accepts the canonical labels plus loose spellings ("Explicit Multi-Step").
std::optional<QueryClass> parse_query_class(std::string_view label);
bool is_multi_tool_class(QueryClass c);

// ---- P-P graph ------------------------------------------------------------

struct PPEdge {
  std::string a;  // a < b
  std::string b;
  double weight = 0.0;
};

struct PPGraph {
  std::vector<std::string> tools;
  std::vector<PPEdge> edges;
  double tau = 0.0;

  std::optional<double> weight(const std::string& x, const std::string& y) const;
};

inline constexpr double kDefaultTau = 0.8;

// Edge iff the best cosine between any input-parameter embedding pair
// (name + description) reaches tau.
PPGraph build_pp_graph(const Catalog& catalog, Embedder& embedder, double tau = kDefaultTau);

// ---- inferred outputs / R-P graph -----------------------------------------

struct AvailableParam {
  std::string name;
  std::string id;  // canonical parameter name
};

struct InferredOutput {
  std::string tool_id;
  std::string parameter_name;
  std::string parameter_id;
  double confidence = 0.0;
  std::string reasoning;
};

inline constexpr double kOutputConfidenceFloor = 0.5;
inline constexpr std::size_t kMaxInferredOutputs = 3;

std::string canonical_parameter(std::string_view name);

// Distinct input parameters of the catalog, first spelling wins.
std::vector<AvailableParam> available_parameters(const Catalog& catalog);

std::string render_output_prompt(const ToolSpec& tool, std::span<const AvailableParam> available);

// Drops items outside `available` (with a warning), below the confidence
// floor, and anything past the first three.
std::vector<InferredOutput> infer_outputs(const ToolSpec& tool,
                                          std::span<const AvailableParam> available,
                                          Generator& generator,
                                          std::vector<std::string>* warnings = nullptr);

struct RPEdge {
  std::string producer;
  std::string consumer;
  std::string parameter;  // canonical
  double confidence = 0.0;
};

struct RPGraph {
  std::vector<RPEdge> edges;
  double floor = kOutputConfidenceFloor;

  // Best confidence over producer -> consumer edges.
  std::optional<double> confidence(const std::string& producer, const std::string& consumer) const;
};

RPGraph build_rp_graph(const Catalog& catalog, std::span<const InferredOutput> inferred,
                       double floor = kOutputConfidenceFloor);

// ---- sequence validation --------------------------------------------------

struct SequenceVerdict {
  bool is_valid = false;
  std::string explanation;
};

std::string render_sequence_prompt(const ToolSpec& first, const ToolSpec& second);

// Uncached pairs in strict offline mode come back invalid.
SequenceVerdict validate_sequence(const ToolSpec& first, const ToolSpec& second,
                                  Generator& generator,
                                  std::vector<std::string>* warnings = nullptr);

// ---- path enumeration -----------------------------------------------------

enum class HopKind { PP, RP };
const char* to_string(HopKind kind);

struct ToolChain {
  std::vector<std::string> tools;
  std::vector<HopKind> hops;  // tools.size() - 1 entries

  bool operator==(const ToolChain& other) const { return tools == other.tools; }
};

using PairSet = std::set<std::pair<std::string, std::string>>;

// Ordered pairs adjacent in the union of both graphs.
PairSet adjacent_pairs(const PPGraph& pp, const RPGraph& rp);

// All simple paths of length 1..max_len over the union graph, restricted to
// `valid_pairs` when given. Neighbours are tried R-P first (higher
// confidence first), then P-P. More than max_paths results are thinned by
// seeded reservoir sampling; max_paths == 0 keeps everything.
std::vector<ToolChain> enumerate_paths(const PPGraph& pp, const RPGraph& rp,
                                       const std::optional<PairSet>& valid_pairs,
                                       std::size_t max_len, std::size_t max_paths,
                                       std::uint64_t seed);

// Seeded reservoir sample of n chains, kept in input order.
std::vector<ToolChain> sample_paths(std::vector<ToolChain> chains, std::size_t n, std::uint64_t seed);

// ---- queries --------------------------------------------------------------

enum class ValidationGate { None, ClassValidation, LogicalSequence, ErrorDetection };
const char* to_string(ValidationGate gate);

struct QueryRecord {
  std::string id;
  std::string query;
  QueryClass query_class = QueryClass::SingleIntent;
  std::set<std::string> gold_tools;
  std::vector<std::string> chain;
  ValidationGate flagged_gate = ValidationGate::None;
  std::string flag_reason;

  bool accepted() const { return flagged_gate == ValidationGate::None; }
};

nlohmann::json to_json(const QueryRecord& record);
QueryRecord query_record_from_json(const nlohmann::json& doc);

std::string render_query_prompt(std::span<const ToolSpec> chain, std::span<const QueryClass> classes);

// One record per requested class present in the generator answer. Length-1
// chains only take single-intent; longer chains never do.
std::vector<QueryRecord> generate_queries(const ToolChain& chain, std::span<const QueryClass> classes,
                                          const Catalog& catalog, Generator& generator,
                                          std::vector<std::string>* warnings = nullptr);

struct QueryVerdict {
  ValidationGate gate = ValidationGate::None;
  std::string reason;

  bool accepted() const { return gate == ValidationGate::None; }
};

// Surface rules for the class, then the pairwise chain verdicts (recomputed
// with `generator` when given, else taken from `pair_verdicts`), then error
// detection.
QueryVerdict validate_query(const QueryRecord& record, const Catalog& catalog,
                            Generator* generator,
                            const std::map<std::pair<std::string, std::string>, bool>* pair_verdicts = nullptr);

// Class surface check alone; empty string when it passes.
std::string class_rule_violation(QueryClass query_class, std::string_view query);

// ---- pipeline -------------------------------------------------------------

struct QueryGenConfig {
  double tau = kDefaultTau;
  double rp_floor = kOutputConfidenceFloor;
  std::size_t max_len = 3;
  std::size_t max_paths = 200;
  std::uint64_t seed = kDefaultSeed;
  std::set<QueryClass> classes{std::begin(kAllQueryClasses), std::end(kAllQueryClasses)};
  // Accepted records kept per class; absent = unlimited.
  std::map<QueryClass, std::size_t> class_targets;
};

struct Dataset {
  std::vector<QueryRecord> records;
  nlohmann::json report;
};

Dataset generate_dataset(const Catalog& catalog, Embedder& embedder, Generator& generator,
                         const QueryGenConfig& config);

std::string serialize_dataset(std::span<const QueryRecord> records);
void save_dataset(std::span<const QueryRecord> records, const std::string& path);
std::vector<QueryRecord> load_dataset(const std::string& path);

}  // namespace toolkg
