#include "toolkg/querygen.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>

#include "toolkg/canonical.hpp"
#include "toolkg/error.hpp"
#include "toolkg/text.hpp"

namespace toolkg {

namespace {

constexpr const char* kModule = "querygen";

std::string lower_dashed(std::string_view label) {
  std::string out;
  for (char c : label) {
    if (c == ' ' || c == '_') {
      out += '-';
    } else {
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  return out;
}

std::string parameter_text(const ParameterSpec& p) {
  std::string name = p.name;
  std::replace(name.begin(), name.end(), '_', ' ');
  return p.description.empty() ? name : name + " " + p.description;
}

void warn(std::vector<std::string>* warnings, std::string message) {
  if (warnings) warnings->push_back(std::move(message));
}

std::string describe_tool(const ToolSpec& tool) {
  std::ostringstream out;
  out << "  name: " << tool.title << "\n  description: " << tool.description << "\n  inputs:";
  if (tool.parameters.empty()) out << " none";
  out << "\n";
  for (const auto& p : tool.parameters) {
    out << "    - " << p.name;
    if (!p.value_type.empty()) out << " (" << p.value_type << ")";
    if (!p.description.empty()) out << ": " << p.description;
    out << "\n";
  }
  return out.str();
}

bool has_token(const std::vector<std::string>& tokens, std::string_view word) {
  return std::find(tokens.begin(), tokens.end(), word) != tokens.end();
}

bool has_any(const std::vector<std::string>& tokens, std::initializer_list<std::string_view> words) {
  for (auto w : words) {
    if (has_token(tokens, w)) return true;
  }
  return false;
}

// Sentences end at . ? ! followed by whitespace or the end of the text.
std::size_t sentence_count(std::string_view text) {
  std::size_t count = 0;
  bool content = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    const bool end = (c == '.' || c == '?' || c == '!') &&
                     (i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1])));
    if (end) {
      if (content) ++count;
      content = false;
    } else if (std::isalnum(static_cast<unsigned char>(c))) {
      content = true;
    }
  }
  if (content) ++count;
  return count;
}

}  // namespace

const char* to_string(QueryClass c) {
  switch (c) {
    case QueryClass::ConditionalMultiStep: return "conditional-multi-step";
    case QueryClass::ExplicitMultiStep: return "explicit-multi-step";
    case QueryClass::ImplicitMultiStep: return "implicit-multi-step";
    case QueryClass::IrMultiIntent: return "ir-multi-intent";
    case QueryClass::MultiIntent: return "multi-intent";
    case QueryClass::SingleIntent: return "single-intent";
  }
  return "?";
}

std::optional<QueryClass> parse_query_class(std::string_view label) {
  const auto key = lower_dashed(label);
  for (auto c : kAllQueryClasses) {
    if (key == to_string(c)) return c;
  }
  if (key == "multistep-explicit" || key == "explicit-multistep") return QueryClass::ExplicitMultiStep;
  if (key == "implicit-multistep") return QueryClass::ImplicitMultiStep;
  if (key == "conditional-multistep") return QueryClass::ConditionalMultiStep;
  if (key == "information-retrieval-multi-intent" || key == "ir-multiintent") {
    return QueryClass::IrMultiIntent;
  }
  if (key == "multiintent") return QueryClass::MultiIntent;
  if (key == "singleintent") return QueryClass::SingleIntent;
  return std::nullopt;
}

bool is_multi_tool_class(QueryClass c) { return c != QueryClass::SingleIntent; }

// ---- P-P graph ------------------------------------------------------------

std::optional<double> PPGraph::weight(const std::string& x, const std::string& y) const {
  const auto& [a, b] = x < y ? std::tie(x, y) : std::tie(y, x);
  for (const auto& e : edges) {
    if (e.a == a && e.b == b) return e.weight;
  }
  return std::nullopt;
}

PPGraph build_pp_graph(const Catalog& catalog, Embedder& embedder, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw Error(ErrorKind::Config, kModule, "tau must be in (0, 1], got " + std::to_string(tau));
  }
  std::vector<const ToolSpec*> tools;
  for (const auto& t : catalog.tools) tools.push_back(&t);
  std::sort(tools.begin(), tools.end(),
            [](const ToolSpec* x, const ToolSpec* y) { return x->tool_id < y->tool_id; });

  std::vector<std::string> texts;
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  for (const auto* t : tools) {
    spans.emplace_back(texts.size(), t->parameters.size());
    for (const auto& p : t->parameters) texts.push_back(parameter_text(p));
  }
  const auto vectors = texts.empty() ? std::vector<Embedding>{} : embedder.embed(texts);
  if (vectors.size() != texts.size()) {
    throw Error(ErrorKind::ProviderContract, kModule, "embedder returned the wrong number of vectors");
  }

  PPGraph graph;
  graph.tau = tau;
  for (const auto* t : tools) graph.tools.push_back(t->tool_id);
  for (std::size_t i = 0; i < tools.size(); ++i) {
    for (std::size_t j = i + 1; j < tools.size(); ++j) {
      double best = -1.0;
      for (std::size_t x = 0; x < spans[i].second; ++x) {
        for (std::size_t y = 0; y < spans[j].second; ++y) {
          best = std::max(best, cosine(vectors[spans[i].first + x], vectors[spans[j].first + y]));
        }
      }
      if (spans[i].second > 0 && spans[j].second > 0 && best >= tau) {
        graph.edges.push_back({tools[i]->tool_id, tools[j]->tool_id, best});
      }
    }
  }
  return graph;
}

// ---- inferred outputs -----------------------------------------------------

std::string canonical_parameter(std::string_view name) {
  std::string spaced(name);
  for (char& c : spaced) {
    if (c == '_' || c == '-') c = ' ';
  }
  std::string canon = canonicalize_entity(spaced);
  std::replace(canon.begin(), canon.end(), ' ', '_');
  return canon;
}

std::vector<AvailableParam> available_parameters(const Catalog& catalog) {
  std::map<std::string, std::string> seen;
  for (const auto& tool : catalog.tools) {
    for (const auto& p : tool.parameters) {
      const auto id = canonical_parameter(p.name);
      seen.emplace(id, p.name);
    }
  }
  std::vector<AvailableParam> out;
  for (const auto& [id, name] : seen) out.push_back({name, id});
  return out;
}

std::string render_output_prompt(const ToolSpec& tool, std::span<const AvailableParam> available) {
  std::ostringstream out;
  out << "Tool under review:\n" << describe_tool(tool);
  out << "Parameters that tools in this catalog accept (name / id):\n";
  for (const auto& a : available) out << "  - " << a.name << " / " << a.id << "\n";
  out << "Which of these parameters would this tool hand back when it finishes, so a later tool "
         "could take them as input? Pick at most 3, only from the list above. Rate each one with "
         "confidence_score from 0 to 1: 0.9 or more when the tool clearly yields the value, 0.7 to "
         "0.89 when it probably does, 0.5 to 0.69 when it might, and leave out anything below 0.5.\n"
         "Answer with a JSON array of objects with keys parameter_name, parameter_id, "
         "confidence_score and reasoning. Answer [] when nothing fits.\n";
  return out.str();
}

std::vector<InferredOutput> infer_outputs(const ToolSpec& tool,
                                          std::span<const AvailableParam> available,
                                          Generator& generator,
                                          std::vector<std::string>* warnings) {
  if (available.empty()) {
    throw Error(ErrorKind::Contract, kModule, "infer_outputs needs a non-empty parameter list");
  }
  GeneratorRequest request;
  request.prompt = render_output_prompt(tool, available);
  request.schema = SchemaTag::OutputParameters;
  request.context_id = tool.tool_id;
  auto avail = nlohmann::json::array();
  for (const auto& a : available) avail.push_back({{"name", a.name}, {"id", a.id}});
  request.context = {{"tool", to_json(tool)}, {"available", avail}};

  const auto response = generator.generate(request);
  validate_schema(SchemaTag::OutputParameters, response.parsed);

  std::vector<InferredOutput> out;
  std::set<std::string> taken;
  for (const auto& item : response.parsed) {
    const auto name = item["parameter_name"].get<std::string>();
    const auto id = item["parameter_id"].get<std::string>();
    const double confidence = item["confidence_score"].get<double>();
    const AvailableParam* match = nullptr;
    for (const auto& a : available) {
      if (a.id == id || a.name == name) {
        match = &a;
        break;
      }
    }
    if (!match) {
      warn(warnings, tool.tool_id + ": dropped output '" + name + "' not in the parameter list");
      continue;
    }
    if (confidence < kOutputConfidenceFloor) continue;
    if (!taken.insert(match->id).second) continue;
    if (out.size() == kMaxInferredOutputs) {
      warn(warnings, tool.tool_id + ": more than 3 outputs, extra dropped");
      break;
    }
    out.push_back({tool.tool_id, match->name, match->id, confidence, item.value("reasoning", "")});
  }
  return out;
}

std::optional<double> RPGraph::confidence(const std::string& producer,
                                          const std::string& consumer) const {
  std::optional<double> best;
  for (const auto& e : edges) {
    if (e.producer == producer && e.consumer == consumer) {
      best = std::max(best.value_or(e.confidence), e.confidence);
    }
  }
  return best;
}

RPGraph build_rp_graph(const Catalog& catalog, std::span<const InferredOutput> inferred,
                       double floor) {
  RPGraph graph;
  graph.floor = floor;
  std::map<std::string, std::set<std::string>> consumers;  // canonical param -> tools
  for (const auto& tool : catalog.tools) {
    for (const auto& p : tool.parameters) consumers[canonical_parameter(p.name)].insert(tool.tool_id);
  }
  for (const auto& out : inferred) {
    if (out.confidence < floor) continue;
    const auto it = consumers.find(canonical_parameter(out.parameter_id));
    if (it == consumers.end()) continue;
    for (const auto& consumer : it->second) {
      if (consumer == out.tool_id) continue;
      graph.edges.push_back({out.tool_id, consumer, it->first, out.confidence});
    }
  }
  std::sort(graph.edges.begin(), graph.edges.end(), [](const RPEdge& x, const RPEdge& y) {
    return std::tie(x.producer, x.consumer, x.parameter) < std::tie(y.producer, y.consumer, y.parameter);
  });
  return graph;
}

// ---- sequence validation --------------------------------------------------

std::string render_sequence_prompt(const ToolSpec& first, const ToolSpec& second) {
  std::ostringstream out;
  out << "Two tools might be run back to back for one user request.\n";
  out << "First tool (id " << first.tool_id << "):\n" << describe_tool(first);
  out << "Second tool (id " << second.tool_id << "):\n" << describe_tool(second);
  out << "Would a user plausibly run the first tool and afterwards the second one for the same "
         "goal, for example because the first produces something the second needs? Reply with a "
         "JSON object with keys from_scenario_id, to_scenario_id, is_valid (boolean) and "
         "explanation (one sentence).\n";
  return out.str();
}

SequenceVerdict validate_sequence(const ToolSpec& first, const ToolSpec& second,
                                  Generator& generator, std::vector<std::string>* warnings) {
  GeneratorRequest request;
  request.prompt = render_sequence_prompt(first, second);
  request.schema = SchemaTag::SequenceVerdict;
  request.context_id = first.tool_id + ">" + second.tool_id;
  request.context = {{"from", to_json(first)}, {"to", to_json(second)}};
  try {
    const auto response = generator.generate(request);
    validate_schema(SchemaTag::SequenceVerdict, response.parsed);
    return {response.parsed["is_valid"].get<bool>(), response.parsed.value("explanation", "")};
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::CacheMiss) throw;
    warn(warnings, request.context_id + ": no transcript, pair treated as invalid");
    return {false, "no transcript available"};
  }
}

// ---- path enumeration -----------------------------------------------------

const char* to_string(HopKind kind) { return kind == HopKind::RP ? "rp" : "pp"; }

PairSet adjacent_pairs(const PPGraph& pp, const RPGraph& rp) {
  PairSet pairs;
  for (const auto& e : pp.edges) {
    pairs.emplace(e.a, e.b);
    pairs.emplace(e.b, e.a);
  }
  for (const auto& e : rp.edges) pairs.emplace(e.producer, e.consumer);
  return pairs;
}

std::vector<ToolChain> enumerate_paths(const PPGraph& pp, const RPGraph& rp,
                                       const std::optional<PairSet>& valid_pairs,
                                       std::size_t max_len, std::size_t max_paths,
                                       std::uint64_t seed) {
  if (max_len < 1 || max_len > 4) {
    throw Error(ErrorKind::Config, kModule, "max_len must be in [1, 4], got " + std::to_string(max_len));
  }
  std::set<std::string> nodes(pp.tools.begin(), pp.tools.end());
  for (const auto& e : rp.edges) {
    nodes.insert(e.producer);
    nodes.insert(e.consumer);
  }

  // Ordered neighbour lists: R-P by confidence, then P-P by weight.
  struct Hop {
    std::string to;
    HopKind kind;
  };
  std::map<std::string, std::vector<Hop>> next;
  {
    std::map<std::string, std::map<std::string, double>> rp_best;
    for (const auto& e : rp.edges) {
      auto& slot = rp_best[e.producer][e.consumer];
      slot = std::max(slot, e.confidence);
    }
    std::map<std::string, std::vector<std::pair<std::string, double>>> pp_adj;
    for (const auto& e : pp.edges) {
      pp_adj[e.a].emplace_back(e.b, e.weight);
      pp_adj[e.b].emplace_back(e.a, e.weight);
    }
    auto by_score = [](const std::pair<std::string, double>& x, const std::pair<std::string, double>& y) {
      return x.second != y.second ? x.second > y.second : x.first < y.first;
    };
    for (const auto& u : nodes) {
      auto& hops = next[u];
      std::set<std::string> listed;
      std::vector<std::pair<std::string, double>> rps(rp_best[u].begin(), rp_best[u].end());
      std::sort(rps.begin(), rps.end(), by_score);
      for (const auto& [v, c] : rps) {
        if (listed.insert(v).second) hops.push_back({v, HopKind::RP});
      }
      auto pps = pp_adj[u];
      std::sort(pps.begin(), pps.end(), by_score);
      for (const auto& [v, w] : pps) {
        if (listed.insert(v).second) hops.push_back({v, HopKind::PP});
      }
    }
  }

  std::vector<ToolChain> all;
  ToolChain current;
  std::set<std::string> on_path;
  std::function<void(const std::string&)> dfs = [&](const std::string& u) {
    all.push_back(current);
    if (current.tools.size() == max_len) return;
    for (const auto& hop : next[u]) {
      if (on_path.contains(hop.to)) continue;
      if (valid_pairs && !valid_pairs->contains({u, hop.to})) continue;
      current.tools.push_back(hop.to);
      current.hops.push_back(hop.kind);
      on_path.insert(hop.to);
      dfs(hop.to);
      on_path.erase(hop.to);
      current.tools.pop_back();
      current.hops.pop_back();
    }
  };
  for (const auto& start : nodes) {
    current = ToolChain{{start}, {}};
    on_path = {start};
    dfs(start);
  }

  return sample_paths(std::move(all), max_paths, seed);
}

std::vector<ToolChain> sample_paths(std::vector<ToolChain> chains, std::size_t n, std::uint64_t seed) {
  if (n == 0 || chains.size() <= n) return chains;
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> keep(n);
  for (std::size_t i = 0; i < n; ++i) keep[i] = i;
  for (std::size_t i = n; i < chains.size(); ++i) {
    const auto j = static_cast<std::size_t>(rng() % (i + 1));
    if (j < n) keep[j] = i;
  }
  std::sort(keep.begin(), keep.end());
  std::vector<ToolChain> sampled;
  sampled.reserve(n);
  for (auto i : keep) sampled.push_back(std::move(chains[i]));
  return sampled;
}

// ---- queries --------------------------------------------------------------

const char* to_string(ValidationGate gate) {
  switch (gate) {
    case ValidationGate::None: return "none";
    case ValidationGate::ClassValidation: return "class_validation";
    case ValidationGate::LogicalSequence: return "logical_sequence";
    case ValidationGate::ErrorDetection: return "error_detection";
  }
  return "?";
}

namespace {

ValidationGate parse_gate(std::string_view name) {
  for (auto g : {ValidationGate::ClassValidation, ValidationGate::LogicalSequence,
                 ValidationGate::ErrorDetection}) {
    if (name == to_string(g)) return g;
  }
  throw Error(ErrorKind::Parse, kModule, "unknown validation gate '" + std::string(name) + "'");
}

}  // namespace

nlohmann::json to_json(const QueryRecord& record) {
  nlohmann::json doc = {
      {"id", record.id},
      {"query", record.query},
      {"query_class", to_string(record.query_class)},
      {"gold_tools", record.gold_tools},
      {"chain", record.chain},
      {"status", record.accepted() ? "accepted" : "flagged"},
  };
  if (!record.accepted()) {
    doc["flag_gate"] = to_string(record.flagged_gate);
    doc["flag_reason"] = record.flag_reason;
  }
  return doc;
}

QueryRecord query_record_from_json(const nlohmann::json& doc) {
  QueryRecord r;
  try {
    r.id = doc.at("id").get<std::string>();
    r.query = doc.at("query").get<std::string>();
    const auto label = doc.at("query_class").get<std::string>();
    const auto cls = parse_query_class(label);
    if (!cls) throw Error(ErrorKind::Parse, kModule, "unknown query class '" + label + "'");
    r.query_class = *cls;
    for (const auto& g : doc.at("gold_tools")) r.gold_tools.insert(g.get<std::string>());
    if (doc.contains("chain")) r.chain = doc["chain"].get<std::vector<std::string>>();
    const auto status = doc.value("status", "accepted");
    if (status == "flagged") {
      r.flagged_gate = parse_gate(doc.at("flag_gate").get<std::string>());
      r.flag_reason = doc.value("flag_reason", "");
    } else if (status != "accepted") {
      throw Error(ErrorKind::Parse, kModule, "unknown status '" + status + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, kModule, std::string("malformed query record: ") + e.what());
  }
  if (r.gold_tools.empty()) {
    throw Error(ErrorKind::Parse, kModule, "query record '" + r.id + "' has no gold tools");
  }
  return r;
}

namespace {

const char* class_definition(QueryClass c) {
  switch (c) {
    case QueryClass::SingleIntent:
      return "one request that a single tool can serve";
    case QueryClass::MultiIntent:
      return "several unrelated requests packed into one message";
    case QueryClass::ExplicitMultiStep:
      return "steps spelled out in order, using words such as \"then\" or \"after that\"";
    case QueryClass::ImplicitMultiStep:
      return "a goal that needs the steps without naming their order; do not use \"then\" or "
             "\"also\" and do not start with \"If\"";
    case QueryClass::ConditionalMultiStep:
      return "a later step only happens when a condition on an earlier result holds, phrased with "
             "\"If ...\"";
    case QueryClass::IrMultiIntent:
      return "a general knowledge question combined with a request to act with the tools";
  }
  return "";
}

}  // namespace

std::string render_query_prompt(std::span<const ToolSpec> chain, std::span<const QueryClass> classes) {
  std::ostringstream out;
  out << "A user works through these tools, in this order:\n";
  for (std::size_t i = 0; i < chain.size(); ++i) {
    out << "Step " << (i + 1) << " (id " << chain[i].tool_id << "):\n" << describe_tool(chain[i]);
  }
  out << "Write one realistic user message for each kind listed below. Use concrete made-up values "
         "for identifiers, dates and amounts, speak like an employee rather than an engineer, and "
         "avoid copying words from the tool descriptions.\n";
  for (auto c : classes) out << "  - " << to_string(c) << ": " << class_definition(c) << "\n";
  out << "Reply with a JSON object {\"queries\": [{\"query_class\": ..., \"query\": ...}]}.\n";
  return out.str();
}

std::vector<QueryRecord> generate_queries(const ToolChain& chain, std::span<const QueryClass> classes,
                                          const Catalog& catalog, Generator& generator,
                                          std::vector<std::string>* warnings) {
  if (chain.tools.empty()) throw Error(ErrorKind::Contract, kModule, "empty tool chain");
  for (auto c : classes) {
    const bool single_chain = chain.tools.size() == 1;
    if (single_chain == is_multi_tool_class(c)) {
      throw Error(ErrorKind::IncompatibleClass, kModule,
                  std::string("class ") + to_string(c) + " cannot be generated from a chain of " +
                      std::to_string(chain.tools.size()) + " tool(s)");
    }
  }
  std::vector<ToolSpec> specs;
  std::string context_id;
  auto chain_json = nlohmann::json::array();
  for (const auto& id : chain.tools) {
    const auto* spec = catalog.find(id);
    if (!spec) throw Error(ErrorKind::NotFound, kModule, "chain tool '" + id + "' not in catalog");
    specs.push_back(*spec);
    chain_json.push_back(to_json(*spec));
    if (!context_id.empty()) context_id += ">";
    context_id += id;
  }
  auto class_json = nlohmann::json::array();
  for (auto c : classes) class_json.push_back(to_string(c));

  GeneratorRequest request;
  request.prompt = render_query_prompt(specs, classes);
  request.schema = SchemaTag::QueryBundle;
  request.context_id = context_id;
  request.context = {{"chain", chain_json}, {"classes", class_json}};
  const auto response = generator.generate(request);
  validate_schema(SchemaTag::QueryBundle, response.parsed);

  std::vector<QueryRecord> out;
  for (auto c : classes) {
    bool found = false;
    for (const auto& q : response.parsed["queries"]) {
      if (parse_query_class(q["query_class"].get<std::string>()) != c) continue;
      QueryRecord r;
      r.query = q["query"].get<std::string>();
      r.query_class = c;
      r.gold_tools.insert(chain.tools.begin(), chain.tools.end());
      r.chain = chain.tools;
      out.push_back(std::move(r));
      found = true;
      break;
    }
    if (!found) warn(warnings, context_id + ": no query returned for " + to_string(c));
  }
  return out;
}

std::string class_rule_violation(QueryClass query_class, std::string_view query) {
  const auto tokens = tokenize(query, TokenizerMode::WordBoundary);
  const bool leading_if = !tokens.empty() && tokens.front() == "if";
  const auto sentences = sentence_count(query);
  switch (query_class) {
    case QueryClass::SingleIntent:
      if (has_any(tokens, {"then", "also"})) return "single request uses a sequencing word";
      return {};
    case QueryClass::ImplicitMultiStep:
      if (has_token(tokens, "then")) return "implicit query contains \"then\"";
      if (has_token(tokens, "also")) return "implicit query contains \"also\"";
      if (leading_if) return "implicit query starts with \"If\"";
      return {};
    case QueryClass::ExplicitMultiStep:
      if (!has_any(tokens, {"then", "after", "afterwards", "next", "once", "before", "first",
                            "followed", "finally"})) {
        return "explicit query has no ordering word";
      }
      return {};
    case QueryClass::ConditionalMultiStep:
      if (!has_any(tokens, {"if", "unless", "whenever", "provided"})) {
        return "conditional query has no condition";
      }
      return {};
    case QueryClass::MultiIntent:
      if (sentences < 2 && !has_any(tokens, {"and", "also", "plus", "additionally"})) {
        return "multi-intent query holds a single request";
      }
      return {};
    case QueryClass::IrMultiIntent: {
      const bool question =
          query.find('?') != std::string_view::npos ||
          (!tokens.empty() && has_any({tokens.front()}, {"what", "how", "why", "which", "who",
                                                         "where", "explain", "tell"}));
      if (!question) return "ir query has no information request";
      if (sentences < 2 && !has_any(tokens, {"and", "also"})) return "ir query has no action request";
      return {};
    }
  }
  return {};
}

QueryVerdict validate_query(const QueryRecord& record, const Catalog& catalog, Generator* generator,
                            const std::map<std::pair<std::string, std::string>, bool>* pair_verdicts) {
  if (auto why = class_rule_violation(record.query_class, record.query); !why.empty()) {
    return {ValidationGate::ClassValidation, why};
  }
  for (std::size_t i = 0; i + 1 < record.chain.size(); ++i) {
    const auto& a = record.chain[i];
    const auto& b = record.chain[i + 1];
    bool ok = false;
    if (generator) {
      const auto* sa = catalog.find(a);
      const auto* sb = catalog.find(b);
      ok = sa && sb && validate_sequence(*sa, *sb, *generator).is_valid;
    } else if (pair_verdicts) {
      const auto it = pair_verdicts->find({a, b});
      ok = it != pair_verdicts->end() && it->second;
    }
    if (!ok) return {ValidationGate::LogicalSequence, "pair " + a + " -> " + b + " not verified"};
  }
  const auto trimmed = record.query.find_first_not_of(" \t\r\n");
  if (trimmed == std::string::npos) return {ValidationGate::ErrorDetection, "empty query"};
  if (record.query.find_first_of("{}") != std::string::npos) {
    return {ValidationGate::ErrorDetection, "unresolved placeholder"};
  }
  if (record.gold_tools.empty()) return {ValidationGate::ErrorDetection, "no gold tools"};
  if (!record.chain.empty() && record.gold_tools.size() != record.chain.size()) {
    return {ValidationGate::ErrorDetection, "repeated tool in chain"};
  }
  for (const auto& g : record.gold_tools) {
    if (!catalog.find(g)) return {ValidationGate::ErrorDetection, "unknown gold tool " + g};
  }
  return {};
}

// ---- pipeline -------------------------------------------------------------

Dataset generate_dataset(const Catalog& catalog, Embedder& embedder, Generator& generator,
                         const QueryGenConfig& config) {
  std::vector<std::string> warnings;
  const auto pp = build_pp_graph(catalog, embedder, config.tau);
  const auto available = available_parameters(catalog);
  std::vector<InferredOutput> inferred;
  if (!available.empty()) {
    std::vector<const ToolSpec*> tools;
    for (const auto& t : catalog.tools) tools.push_back(&t);
    std::sort(tools.begin(), tools.end(),
              [](const ToolSpec* x, const ToolSpec* y) { return x->tool_id < y->tool_id; });
    for (const auto* t : tools) {
      auto outs = infer_outputs(*t, available, generator, &warnings);
      inferred.insert(inferred.end(), outs.begin(), outs.end());
    }
  }
  const auto rp = build_rp_graph(catalog, inferred, config.rp_floor);

  std::map<std::pair<std::string, std::string>, bool> verdicts;
  PairSet valid;
  for (const auto& [a, b] : adjacent_pairs(pp, rp)) {
    const bool ok = validate_sequence(*catalog.find(a), *catalog.find(b), generator, &warnings).is_valid;
    verdicts[{a, b}] = ok;
    if (ok) valid.emplace(a, b);
  }
  // Single tools and multi-tool chains are sampled apart so that neither
  // crowds out the other.
  std::vector<ToolChain> singles;
  std::vector<ToolChain> multi;
  for (auto& c : enumerate_paths(pp, rp, valid, config.max_len, 0, config.seed)) {
    (c.tools.size() == 1 ? singles : multi).push_back(std::move(c));
  }
  std::size_t single_cap = config.max_paths;
  if (const auto it = config.class_targets.find(QueryClass::SingleIntent); it != config.class_targets.end()) {
    single_cap = single_cap == 0 ? it->second : std::min(single_cap, it->second);
  }
  auto chains = sample_paths(std::move(singles), single_cap, config.seed);
  for (auto& c : sample_paths(std::move(multi), config.max_paths, config.seed + 1)) {
    chains.push_back(std::move(c));
  }

  Dataset dataset;
  std::map<QueryClass, std::size_t> accepted;
  std::map<QueryClass, std::size_t> flagged;
  auto full = [&](QueryClass c) {
    const auto it = config.class_targets.find(c);
    return it != config.class_targets.end() && accepted[c] >= it->second;
  };
  for (const auto& chain : chains) {
    std::vector<QueryClass> wanted;
    for (auto c : kAllQueryClasses) {
      if (!config.classes.contains(c) || full(c)) continue;
      if ((chain.tools.size() == 1) != is_multi_tool_class(c)) wanted.push_back(c);
    }
    if (wanted.empty()) continue;
    for (auto& record : generate_queries(chain, wanted, catalog, generator, &warnings)) {
      const auto verdict = validate_query(record, catalog, nullptr, &verdicts);
      record.flagged_gate = verdict.gate;
      record.flag_reason = verdict.reason;
      if (record.accepted() && full(record.query_class)) continue;
      (record.accepted() ? accepted : flagged)[record.query_class]++;
      char id[16];
      std::snprintf(id, sizeof id, "q%05zu", dataset.records.size() + 1);
      record.id = id;
      dataset.records.push_back(std::move(record));
    }
  }

  nlohmann::json per_class = nlohmann::json::object();
  for (auto c : kAllQueryClasses) {
    per_class[to_string(c)] = {{"accepted", accepted[c]}, {"flagged", flagged[c]}};
  }
  dataset.report = {
      {"tau", config.tau},
      {"pp_edges", pp.edges.size()},
      {"rp_edges", rp.edges.size()},
      {"inferred_outputs", inferred.size()},
      {"validated_pairs", valid.size()},
      {"checked_pairs", verdicts.size()},
      {"chains", chains.size()},
      {"records", dataset.records.size()},
      {"classes", per_class},
      {"warnings", warnings},
  };
  return dataset;
}

std::string serialize_dataset(std::span<const QueryRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += to_json(r).dump();
    out += '\n';
  }
  return out;
}

void save_dataset(std::span<const QueryRecord> records, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, kModule, "cannot write " + path);
  out << serialize_dataset(records);
}

std::vector<QueryRecord> load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, kModule, "cannot read " + path);
  std::vector<QueryRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    try {
      records.push_back(query_record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Parse, kModule, path + ": line " + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw Error(e.kind(), kModule, path + ": line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

}  // namespace toolkg
