#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace toolkg {

enum class TokenizerMode { Whitespace, WordBoundary, Lemma };

const char* to_string(TokenizerMode mode);
std::optional<TokenizerMode> parse_tokenizer_mode(std::string_view name);

// whitespace: split on Unicode whitespace; word_boundary: runs of word
// characters; lemma: word_boundary plus per-token singularization.
// All modes lowercase.
std::vector<std::string> tokenize(std::string_view text, TokenizerMode mode);

// 64-bit FNV-1a. Stable across platforms, used for fingerprints and cache keys.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t basis = 0xcbf29ce484222325ULL);

std::string hex64(std::uint64_t value);

}  // namespace toolkg
