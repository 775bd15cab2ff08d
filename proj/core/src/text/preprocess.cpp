// SPDX-License-Identifier: Apache-2.0
#include "armi/text/preprocess.hpp"

#include <array>

#include "armi/text/emoji_table.hpp"
#include "armi/text/utf8.hpp"

namespace armi::text {
namespace {

bool is_ascii_word(char32_t cp) {
  return (cp >= U'a' && cp <= U'z') || (cp >= U'A' && cp <= U'Z') || (cp >= U'0' && cp <= U'9') ||
         cp == U'_';
}

bool is_unicode_punctuation(char32_t cp) {
  return (cp >= 0x2000 && cp <= 0x206F) || cp == 0x060C || cp == 0x061B || cp == 0x061F ||
         (cp >= 0x066A && cp <= 0x066D) || cp == 0x06D4 || (cp >= 0x3000 && cp <= 0x303F) ||
         cp == 0xFE0E || cp == 0xFE0F || cp == 0xFFFD;
}

// Letters, digits and underscore; non-ASCII codepoints count unless they are
// whitespace, punctuation or emoji.
bool is_word(char32_t cp) {
  if (cp < 0x80) return is_ascii_word(cp);
  return !is_space(cp) && !is_unicode_punctuation(cp) && !is_emoji_codepoint(cp);
}

char32_t ascii_lower(char32_t cp) { return (cp >= U'A' && cp <= U'Z') ? cp + 32 : cp; }

bool starts_with_ci(std::u32string_view s, std::size_t pos, std::u32string_view prefix) {
  if (pos + prefix.size() > s.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (ascii_lower(s[pos + i]) != prefix[i]) return false;
  }
  return true;
}

// Length of the URL starting at pos, 0 if none.
std::size_t url_length(std::u32string_view s, std::size_t pos) {
  if (pos > 0 && is_ascii_word(s[pos - 1])) return 0;
  std::size_t prefix = 0;
  for (std::u32string_view p : {std::u32string_view(U"https://"), std::u32string_view(U"http://"),
                                std::u32string_view(U"www.")}) {
    if (starts_with_ci(s, pos, p)) {
      prefix = p.size();
      break;
    }
  }
  if (prefix == 0) return 0;
  std::size_t end = pos + prefix;
  while (end < s.size() && !is_space(s[end])) ++end;
  return end > pos + prefix ? end - pos : 0;
}

std::size_t mention_length(std::u32string_view s, std::size_t pos) {
  if (s[pos] != U'@') return 0;
  if (pos > 0 && is_word(s[pos - 1])) return 0;
  std::size_t i = pos;
  while (i < s.size() && s[i] == U'@') ++i;
  const std::size_t body = i;
  while (i < s.size() && is_word(s[i])) ++i;
  return i > body ? i - pos : 0;
}

bool is_diacritic(char32_t cp) {
  return (cp >= 0x064B && cp <= 0x065F) || cp == 0x0670 || (cp >= 0x06D6 && cp <= 0x06ED);
}

}  // namespace

std::string substitute_mentions_urls(std::string_view text) {
  const std::u32string s = decode_utf8(text);
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (const auto n = url_length(s, i)) {
      out += "url";
      i += n;
    } else if (const auto m = mention_length(s, i)) {
      out += "user";
      i += m;
    } else {
      append_utf8(out, s[i]);
      ++i;
    }
  }
  return out;
}

std::string normalize_hashtags(std::string_view text) {
  const std::u32string s = decode_utf8(text);
  std::string out;
  out.reserve(text.size());
  bool in_tag = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char32_t cp = s[i];
    if (cp == U'#') {
      in_tag = true;
      continue;
    }
    if (is_space(cp)) {
      in_tag = false;
      append_utf8(out, cp);
      continue;
    }
    if (in_tag && cp == U'_') {
      if (i == 0 || s[i - 1] != U'_') out.push_back(' ');
      continue;
    }
    append_utf8(out, cp);
  }
  return out;
}

std::string collapse_whitespace(std::string_view text) {
  const std::u32string s = decode_utf8(text);
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char32_t cp : s) {
    if (is_space(cp)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    append_utf8(out, cp);
  }
  return out;
}

EmojiExtraction extract_emojis(std::string_view text) {
  const std::u32string s = decode_utf8(text);
  EmojiExtraction result;
  std::string stripped;
  stripped.reserve(text.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (const auto n = emoji_cluster_length(s, i)) {
      result.emojis.push_back(encode_utf8(std::u32string_view(s).substr(i, n)));
      stripped.push_back(' ');
      i += n;
    } else {
      append_utf8(stripped, s[i]);
      ++i;
    }
  }
  result.text = collapse_whitespace(stripped);
  return result;
}

std::string remove_diacritics(std::string_view text) {
  std::string out;
  for (char32_t cp : decode_utf8(text)) {
    if (!is_diacritic(cp)) append_utf8(out, cp);
  }
  return out;
}

std::string neutralize_special_markers(std::string_view text) {
  static constexpr std::array<std::string_view, 4> kMarkers{kClsToken, kSepToken, kPadToken,
                                                            kUnkToken};
  std::string current(text);
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto marker : kMarkers) {
      std::size_t at = current.find(marker);
      while (at != std::string::npos) {
        current.replace(at, marker.size(), marker.substr(1, marker.size() - 2));
        changed = true;
        at = current.find(marker, at);
      }
    }
  }
  return current;
}

std::string render_input(std::string_view normalized_text, const std::vector<std::string>& emojis) {
  std::string out(kClsToken);
  if (!normalized_text.empty()) {
    out.push_back(' ');
    out.append(normalized_text);
  }
  out.push_back(' ');
  out.append(kSepToken);
  for (const auto& e : emojis) {
    out.push_back(' ');
    out.append(e);
  }
  out.push_back(' ');
  out.append(kSepToken);
  return out;
}

std::string render_input(const NormalizedInput& input) {
  return render_input(input.normalized_text, input.emojis);
}

NormalizedInput preprocess(std::string_view raw, const PreprocessOptions& options) {
  NormalizedInput result;
  EmojiExtraction extracted = extract_emojis(raw);
  std::string text = substitute_mentions_urls(extracted.text);
  text = normalize_hashtags(text);
  // Hashtag bodies, stripped diacritics and neutralized markers can all
  // expose new mention/URL boundaries ("#a_@b", "@[UNK]"). Substitution never
  // emits '[', so this settles once no marker is left to strip.
  for (;;) {
    text = substitute_mentions_urls(text);
    if (options.remove_diacritics) text = remove_diacritics(text);
    std::string neutral = neutralize_special_markers(text);
    if (neutral == text) break;
    text = std::move(neutral);
  }
  result.normalized_text = collapse_whitespace(text);
  result.emojis = std::move(extracted.emojis);
  result.rendered = render_input(result);
  return result;
}

}  // namespace armi::text
