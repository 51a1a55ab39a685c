// Rule-based stand-in for a hosted generator. Every answer is a pure function
// of the request context and the seed.
#include <algorithm>
#include <map>
#include <set>

#include "toolkg/canonical.hpp"
#include "toolkg/catalog.hpp"
#include "toolkg/error.hpp"
#include "toolkg/providers.hpp"
#include "toolkg/text.hpp"

namespace toolkg {

namespace {

constexpr const char* kModule = "providers";

const std::set<std::string, std::less<>> kIdentSuffixes = {"id", "number", "code", "key", "no"};
const std::set<std::string, std::less<>> kProducerVerbs = {
    "create", "read",  "query", "get",   "list",  "show",  "find",   "search",
    "generate", "submit", "add", "register", "display", "fetch", "retrieve", "post"};
const std::set<std::string, std::less<>> kReaderVerbs = {"read", "query", "get", "show",
                                                         "display", "fetch", "retrieve", "list"};

std::string join(const std::vector<std::string>& words, const char* sep = " ") {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += sep;
    out += w;
  }
  return out;
}

struct ParamView {
  std::string name;
  std::string key;  // lemma tokens joined with '_'
  std::vector<std::string> stem;  // lemma tokens minus an identifier suffix
  bool ident = false;
  std::string value_type;
};

ParamView view_param(const nlohmann::json& p) {
  ParamView v;
  v.name = p.at("name").get<std::string>();
  v.value_type = p.value("value_type", "");
  std::string spaced = v.name;
  std::replace(spaced.begin(), spaced.end(), '_', ' ');
  v.stem = tokenize(spaced, TokenizerMode::Lemma);
  v.key = join(v.stem, "_");
  if (v.stem.size() > 1 && kIdentSuffixes.contains(v.stem.back())) {
    v.ident = true;
    v.stem.pop_back();
  } else if (v.stem.size() == 1 && kIdentSuffixes.contains(v.stem.back())) {
    v.ident = true;
    v.stem.clear();
  }
  return v;
}

struct ToolView {
  std::string id;
  std::string title;
  std::vector<std::string> title_lemmas;
  std::string verb;                  // first title word, lowercase
  std::string object;                // remaining title words, lowercase
  std::vector<ParamView> params;
  std::set<std::string> param_keys;  // joined lemma tokens incl. suffix
};

ToolView view_tool(const nlohmann::json& tool) {
  ToolView v;
  v.id = tool.at("tool_id").get<std::string>();
  v.title = tool.at("title").get<std::string>();
  v.title_lemmas = tokenize(v.title, TokenizerMode::Lemma);
  const auto words = tokenize(v.title, TokenizerMode::WordBoundary);
  if (!words.empty()) v.verb = words.front();
  v.object = words.size() > 1 ? join({words.begin() + 1, words.end()}) : join(words);
  if (tool.contains("parameters")) {
    for (const auto& p : tool["parameters"]) {
      auto pv = view_param(p);
      v.param_keys.insert(pv.key);
      v.params.push_back(std::move(pv));
    }
  }
  return v;
}

bool subset_of(const std::vector<std::string>& xs, const std::vector<std::string>& ys) {
  if (xs.empty()) return false;
  for (const auto& x : xs) {
    if (std::find(ys.begin(), ys.end(), x) == ys.end()) return false;
  }
  return true;
}

nlohmann::json triples(const nlohmann::json& context) {
  const auto tool = view_tool(context.at("tool"));
  std::vector<std::string> entities;
  for (const auto& p : tool.params) {
    if (!p.ident || p.stem.empty()) continue;
    auto e = join(p.stem);
    if (std::find(entities.begin(), entities.end(), e) == entities.end()) entities.push_back(e);
  }
  auto rels = nlohmann::json::array();
  for (const auto& e : entities) {
    rels.push_back({{"head", tool.title}, {"relationship", "has_entity"}, {"tail", e}});
  }
  for (const auto& whole : entities) {
    for (const auto& part : entities) {
      if (whole.size() > part.size() && whole.starts_with(part + " ")) {
        rels.push_back({{"head", whole}, {"relationship", "part_of"}, {"tail", part}});
      }
    }
  }
  return {{"relationships", rels}};
}

nlohmann::json outputs(const nlohmann::json& context) {
  const auto tool = view_tool(context.at("tool"));
  struct Pick {
    double confidence;
    std::string name;
    std::string id;
    std::string why;
  };
  std::vector<Pick> picks;
  for (const auto& a : context.at("available")) {
    const auto pv = view_param({{"name", a.at("name")}});
    if (tool.param_keys.contains(pv.key)) continue;
    if (!subset_of(pv.stem, tool.title_lemmas)) continue;
    const auto id = a.at("id").get<std::string>();
    if (pv.ident && kProducerVerbs.contains(tool.verb)) {
      picks.push_back({0.9, pv.name, id, "the tool works on this object and returns its identifier"});
    } else if (!pv.ident && kReaderVerbs.contains(tool.verb)) {
      picks.push_back({0.7, pv.name, id, "the value is part of the record the tool returns"});
    }
  }
  std::sort(picks.begin(), picks.end(), [](const Pick& x, const Pick& y) {
    return x.confidence != y.confidence ? x.confidence > y.confidence : x.id < y.id;
  });
  if (picks.size() > 3) picks.resize(3);
  auto out = nlohmann::json::array();
  for (const auto& p : picks) {
    out.push_back({{"parameter_name", p.name},
                   {"parameter_id", p.id},
                   {"confidence_score", p.confidence},
                   {"reasoning", p.why}});
  }
  return out;
}

nlohmann::json verdict(const nlohmann::json& context) {
  const auto from = view_tool(context.at("from"));
  const auto to = view_tool(context.at("to"));
  bool valid = false;
  std::string why = "the tools share no data";
  if (from.id != to.id) {
    // Only shared identifiers carry data from one step to the next.
    for (const auto& p : to.params) {
      if (p.ident && from.param_keys.contains(p.key)) {
        valid = true;
        why = "both tools take " + p.key;
        break;
      }
    }
    if (!valid) {
      for (const auto& p : to.params) {
        if (p.ident && subset_of(p.stem, from.title_lemmas)) {
          valid = true;
          why = "the first tool handles the " + join(p.stem) + " the second one needs";
          break;
        }
      }
    }
  }
  return {{"from_scenario_id", from.id},
          {"to_scenario_id", to.id},
          {"is_valid", valid},
          {"explanation", why}};
}

// ---- query templates ------------------------------------------------------

struct Phrasing {
  std::uint64_t seed;
  std::string chain_key;

  std::uint64_t hash(std::string_view salt) const {
    return fnv1a64(chain_key + "|" + std::string(salt), fnv1a64(std::to_string(seed)));
  }
  std::size_t pick(std::string_view salt, std::size_t n) const { return hash(salt) % n; }
};

const std::map<std::string, std::vector<std::string>, std::less<>> kVerbPhrases = {
    {"read", {"show me", "pull up"}},
    {"query", {"look up", "find"}},
    {"show", {"show me", "display"}},
    {"display", {"show me", "bring up"}},
    {"get", {"get", "fetch"}},
    {"list", {"list", "give me"}},
    {"create", {"create", "set up"}},
    {"update", {"update", "change"}},
    {"change", {"change", "modify"}},
    {"delete", {"delete", "remove"}},
    {"remove", {"remove", "drop"}},
    {"approve", {"approve", "sign off on"}},
    {"reject", {"reject", "turn down"}},
    {"send", {"send", "dispatch"}},
    {"cancel", {"cancel", "call off"}},
    {"submit", {"submit", "file"}},
    {"post", {"post", "record"}},
};

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

std::string fake_value(const ParamView& p, const Phrasing& ph, std::string_view salt) {
  const auto h = ph.hash(std::string(salt) + p.name);
  const auto type = ascii_lower(p.value_type);
  const auto name = join(p.stem);
  if (type.find("date") != std::string::npos || name.find("date") != std::string::npos) {
    return "2024-0" + std::to_string(1 + h % 9) + "-" + std::to_string(10 + (h >> 8) % 18);
  }
  if (type.find("enum") != std::string::npos) {
    const auto open = type.find('[');
    const auto comma = type.find_first_of(",]", open == std::string::npos ? 0 : open);
    if (open != std::string::npos && comma != std::string::npos && comma > open + 1) {
      auto option = type.substr(open + 1, comma - open - 1);
      option.erase(0, option.find_first_not_of(' '));
      return option;
    }
  }
  if (name.find("status") != std::string::npos) {
    static const char* kStates[] = {"pending", "approved", "on hold"};
    return kStates[h % 3];
  }
  if (name.find("amount") != std::string::npos || name.find("price") != std::string::npos ||
      name.find("quantity") != std::string::npos || type.find("number") != std::string::npos ||
      type.find("int") != std::string::npos || type.find("decimal") != std::string::npos) {
    return std::to_string(50 * (1 + h % 40));
  }
  if (p.ident) return std::to_string(4500000 + h % 500000);
  static const char* kWords[] = {"urgent", "standard", "final"};
  return kWords[h % 3];
}

struct Step {
  ToolView tool;
  std::string reference;  // "the purchase order 4512345"
  std::string action;     // "show me the purchase order 4512345"
  std::string condition;  // "the status of the purchase order 4512345 is pending"
};

Step make_step(const ToolView& tool, const Phrasing& ph) {
  Step s{tool, {}, {}, {}};
  const ParamView* ident = nullptr;
  const ParamView* attribute = nullptr;
  for (const auto& p : tool.params) {
    if (p.ident && !ident) ident = &p;
    if (!p.ident && !p.stem.empty() && !attribute) attribute = &p;
  }
  s.reference = "the " + tool.object;
  if (ident) {
    const auto stem = join(ident->stem);
    const auto value = fake_value(*ident, ph, tool.id);
    const auto object_lemmas = join(tokenize(tool.object, TokenizerMode::Lemma));
    s.reference += (stem.empty() || stem == object_lemmas) ? " " + value : " for " + stem + " " + value;
  }
  const auto it = kVerbPhrases.find(tool.verb);
  const auto verb = it != kVerbPhrases.end() ? it->second[ph.pick(tool.id + "verb", it->second.size())]
                                             : tool.verb;
  s.action = verb + " " + s.reference;
  if (attribute && (tool.verb == "update" || tool.verb == "change" || tool.verb == "set")) {
    s.action += " so its " + join(attribute->stem) + " becomes " +
                fake_value(*attribute, ph, tool.id + "new");
  }
  const auto cond_name = attribute ? join(attribute->stem) : std::string("status");
  ParamView cond_param = attribute ? *attribute : ParamView{"status", "status", {"status"}, false, ""};
  s.condition = "the " + cond_name + " of " + s.reference + " is " +
                fake_value(cond_param, ph, tool.id + "cond");
  return s;
}

std::string list_actions(const std::vector<Step>& steps, std::size_t from, std::size_t to,
                         const char* last_sep) {
  std::string out;
  for (std::size_t i = from; i < to; ++i) {
    if (i > from) out += (i + 1 == to) ? last_sep : ", ";
    out += steps[i].action;
  }
  return out;
}

std::string compose(const std::string& label, const std::vector<Step>& steps, const Phrasing& ph) {
  const auto n = steps.size();
  const auto v = ph.pick(label, 2);
  if (label == "single-intent") {
    return v == 0 ? capitalize(steps[0].action) + "." : "Could you " + steps[0].action + "?";
  }
  if (label == "explicit-multi-step") {
    std::string out = v == 0 ? capitalize(steps[0].action) : "First " + steps[0].action;
    for (std::size_t i = 1; i < n; ++i) {
      out += (v == 0 || i > 1) ? ", then " : ", and after that ";
      out += steps[i].action;
    }
    return out + ".";
  }
  if (label == "implicit-multi-step") {
    std::string context = steps[0].reference;
    for (std::size_t i = 1; i + 1 < n; ++i) context += " and " + steps[i].reference;
    return v == 0 ? "Using the details of " + context + ", " + steps[n - 1].action + "."
                  : capitalize(steps[n - 1].action) + " based on what is recorded for " + context + ".";
  }
  if (label == "conditional-multi-step") {
    std::string out = "If " + steps[0].condition + ", " + list_actions(steps, 1, n, " and ");
    return out + (v == 0 ? "." : "; otherwise leave it as is.");
  }
  if (label == "multi-intent") {
    return v == 0 ? capitalize(list_actions(steps, 0, n, ", and also ")) + "."
                  : capitalize(list_actions(steps, 0, n, " and ")) + ", please.";
  }
  if (label == "ir-multi-intent") {
    const auto question = v == 0 ? "What is a " + steps[0].tool.object + " used for?"
                                 : "How does a " + steps[0].tool.object + " work in our process?";
    return question + " Also, " + list_actions(steps, 0, n, " and ") + ".";
  }
  throw Error(ErrorKind::GeneratorFormat, kModule, "template generator: unknown class " + label);
}

nlohmann::json queries(const nlohmann::json& context, std::uint64_t seed) {
  std::string key;
  std::vector<ToolView> tools;
  for (const auto& t : context.at("chain")) {
    tools.push_back(view_tool(t));
    key += tools.back().id + ">";
  }
  const Phrasing ph{seed, key};
  std::vector<Step> steps;
  for (const auto& t : tools) steps.push_back(make_step(t, ph));
  auto out = nlohmann::json::array();
  for (const auto& c : context.at("classes")) {
    const auto label = c.get<std::string>();
    out.push_back({{"query_class", label}, {"query", compose(label, steps, ph)}});
  }
  return {{"queries", out}};
}

}  // namespace

GeneratorResponse TemplateGenerator::generate(const GeneratorRequest& request) {
  nlohmann::json value;
  try {
    switch (request.schema) {
      case SchemaTag::Triples: value = triples(request.context); break;
      case SchemaTag::OutputParameters: value = outputs(request.context); break;
      case SchemaTag::SequenceVerdict: value = verdict(request.context); break;
      case SchemaTag::QueryBundle: value = queries(request.context, seed_); break;
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Provider, kModule,
                std::string("template generator needs a structured context: ") + e.what());
  }
  return parse_generator_output(request.schema, value.dump());
}

}  // namespace toolkg
