#include "toolkg/text.hpp"

#include <cstdio>

#include "toolkg/canonical.hpp"
#include "utf8.hpp"

namespace toolkg {

const char* to_string(TokenizerMode mode) {
  switch (mode) {
    case TokenizerMode::Whitespace: return "whitespace";
    case TokenizerMode::WordBoundary: return "word_boundary";
    case TokenizerMode::Lemma: return "lemma";
  }
  return "word_boundary";
}

std::optional<TokenizerMode> parse_tokenizer_mode(std::string_view name) {
  if (name == "whitespace") return TokenizerMode::Whitespace;
  if (name == "word_boundary" || name == "regex") return TokenizerMode::WordBoundary;
  if (name == "lemma") return TokenizerMode::Lemma;
  return std::nullopt;
}

std::vector<std::string> tokenize(std::string_view text, TokenizerMode mode) {
  const auto lowered = ascii_lower(text);
  const std::string_view s = lowered;
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t i = 0; i < s.size();) {
    const auto cp = utf8::decode(s, i);
    const bool keep = mode == TokenizerMode::Whitespace ? !utf8::is_space(cp.value)
                                                        : utf8::is_word(cp.value);
    if (keep) {
      current.append(s.substr(i, cp.length));
    } else {
      flush();
    }
    i += cp.length;
  }
  flush();
  if (mode == TokenizerMode::Lemma) {
    for (auto& t : tokens) t = singularize(t);
  }
  return tokens;
}

std::uint64_t fnv1a64(std::string_view data, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace toolkg
