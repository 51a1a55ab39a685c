#pragma once

#include <string>

namespace toolkg {

enum class TripleOrigin { DefaultRule, Llm };

const char* to_string(TripleOrigin origin);

// Surface triple as emitted by the default rules or the generator.
struct RawTriple {
  std::string head;
  std::string relationship;
  std::string tail;
  std::string source_tool;
  TripleOrigin origin = TripleOrigin::DefaultRule;

  bool operator==(const RawTriple&) const = default;
};

// Canonical triple; endpoints are typed node names.
struct Triple {
  std::string subject;
  std::string subject_type;
  std::string predicate;
  std::string object;
  std::string object_type;
  std::string source_tool;
  TripleOrigin origin = TripleOrigin::DefaultRule;

  // Edge provenance: the tool id for rule triples, "llm_extraction" otherwise.
  std::string provenance() const {
    return origin == TripleOrigin::Llm ? "llm_extraction" : source_tool;
  }

  bool operator==(const Triple&) const = default;
};

}  // namespace toolkg
