// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace armi::text {

inline constexpr std::string_view kClsToken = "[CLS]";
inline constexpr std::string_view kSepToken = "[SEP]";
inline constexpr std::string_view kPadToken = "[PAD]";
inline constexpr std::string_view kUnkToken = "[UNK]";

struct PreprocessOptions {
  // Off by default: the shared-task data ships without diacritics.
  bool remove_diacritics = false;

  friend bool operator==(const PreprocessOptions&, const PreprocessOptions&) = default;
};

struct NormalizedInput {
  std::string normalized_text;
  std::vector<std::string> emojis;  // left-to-right order of occurrence
  std::string rendered;
};

struct EmojiExtraction {
  std::string text;
  std::vector<std::string> emojis;
};

// Mentions: one or more '@' followed by at least one word character, not
// preceded by a word character. URLs: "http://", "https://" or "www."
// (case-insensitive, not preceded by an ASCII word character) followed by a
// non-space run. Mentions become "user", URLs "url".
std::string substitute_mentions_urls(std::string_view text);

// Drops every '#'; inside a hashtag body each run of '_' becomes one space.
std::string normalize_hashtags(std::string_view text);

// Removes emoji clusters, replacing each with a space, then collapses
// whitespace.
EmojiExtraction extract_emojis(std::string_view text);

// Arabic harakat, Quranic marks and the superscript alef.
std::string remove_diacritics(std::string_view text);

// Single spaces between tokens, no leading/trailing whitespace.
std::string collapse_whitespace(std::string_view text);

// Rewrites literal special markers ("[CLS]" -> "CLS", ...) so user text can
// never forge the structure of a rendered input.
std::string neutralize_special_markers(std::string_view text);

// "[CLS] text [SEP] e1 e2 [SEP]"; empty parts are skipped rather than
// producing doubled spaces.
std::string render_input(std::string_view normalized_text, const std::vector<std::string>& emojis);
std::string render_input(const NormalizedInput& input);

// Full tweet normalization: emoji extraction, mention/URL substitution,
// hashtag normalization, optional diacritic removal, marker neutralization,
// whitespace collapsing, then rendering.
NormalizedInput preprocess(std::string_view raw, const PreprocessOptions& options = {});

}  // namespace armi::text
