// SPDX-License-Identifier: Apache-2.0
#include "armi/text/emoji_table.hpp"

#include <algorithm>
#include <array>

namespace armi::text {
namespace {

struct Range {
  char32_t first;
  char32_t last;
};

// Extended_Pictographic, emoji-data 15.0, merged into closed ranges.
constexpr std::array<Range, 78> kPictographic{{
    {0x00A9, 0x00A9},   {0x00AE, 0x00AE},   {0x203C, 0x203C},   {0x2049, 0x2049},
    {0x2122, 0x2122},   {0x2139, 0x2139},   {0x2194, 0x2199},   {0x21A9, 0x21AA},
    {0x231A, 0x231B},   {0x2328, 0x2328},   {0x2388, 0x2388},   {0x23CF, 0x23CF},
    {0x23E9, 0x23F3},   {0x23F8, 0x23FA},   {0x24C2, 0x24C2},   {0x25AA, 0x25AB},
    {0x25B6, 0x25B6},   {0x25C0, 0x25C0},   {0x25FB, 0x25FE},   {0x2600, 0x2605},
    {0x2607, 0x2612},   {0x2614, 0x2685},   {0x2690, 0x2705},   {0x2708, 0x2712},
    {0x2714, 0x2714},   {0x2716, 0x2716},   {0x271D, 0x271D},   {0x2721, 0x2721},
    {0x2728, 0x2728},   {0x2733, 0x2734},   {0x2744, 0x2744},   {0x2747, 0x2747},
    {0x274C, 0x274C},   {0x274E, 0x274E},   {0x2753, 0x2755},   {0x2757, 0x2757},
    {0x2763, 0x2767},   {0x2795, 0x2797},   {0x27A1, 0x27A1},   {0x27B0, 0x27B0},
    {0x27BF, 0x27BF},   {0x2934, 0x2935},   {0x2B05, 0x2B07},   {0x2B1B, 0x2B1C},
    {0x2B50, 0x2B50},   {0x2B55, 0x2B55},   {0x3030, 0x3030},   {0x303D, 0x303D},
    {0x3297, 0x3297},   {0x3299, 0x3299},   {0x1F000, 0x1F0FF}, {0x1F10D, 0x1F10F},
    {0x1F12F, 0x1F12F}, {0x1F16C, 0x1F171}, {0x1F17E, 0x1F17F}, {0x1F18E, 0x1F18E},
    {0x1F191, 0x1F19A}, {0x1F1AD, 0x1F1E5}, {0x1F201, 0x1F20F}, {0x1F21A, 0x1F21A},
    {0x1F22F, 0x1F22F}, {0x1F232, 0x1F23A}, {0x1F23C, 0x1F23F}, {0x1F249, 0x1F3FA},
    {0x1F400, 0x1F53D}, {0x1F546, 0x1F64F}, {0x1F680, 0x1F6FF}, {0x1F774, 0x1F77F},
    {0x1F7D5, 0x1F7FF}, {0x1F80C, 0x1F80F}, {0x1F848, 0x1F84F}, {0x1F85A, 0x1F85F},
    {0x1F888, 0x1F88F}, {0x1F8AE, 0x1F8FF}, {0x1F90C, 0x1F93A}, {0x1F93C, 0x1F945},
    {0x1F947, 0x1FAFF}, {0x1FC00, 0x1FFFD},
}};

constexpr char32_t kZwj = 0x200D;
constexpr char32_t kTextSelector = 0xFE0E;
constexpr char32_t kEmojiSelector = 0xFE0F;
constexpr char32_t kKeycap = 0x20E3;
constexpr char32_t kCancelTag = 0xE007F;

bool in_pictographic(char32_t cp) {
  auto it = std::upper_bound(kPictographic.begin(), kPictographic.end(), cp,
                             [](char32_t v, const Range& r) { return v < r.first; });
  if (it == kPictographic.begin()) return false;
  --it;
  return cp <= it->last;
}

bool is_tag(char32_t cp) { return cp >= 0xE0020 && cp <= 0xE007E; }

bool is_keycap_base(char32_t cp) { return (cp >= U'0' && cp <= U'9') || cp == U'#' || cp == U'*'; }

std::size_t skip_selector(std::u32string_view s, std::size_t i) {
  if (i < s.size() && (s[i] == kEmojiSelector || s[i] == kTextSelector)) ++i;
  return i;
}

}  // namespace

EmojiClass classify_emoji(char32_t cp) {
  if (cp >= 0x1F3FB && cp <= 0x1F3FF) return EmojiClass::kModifier;
  if (cp >= 0x1F1E6 && cp <= 0x1F1FF) return EmojiClass::kRegionalIndicator;
  if (cp == kKeycap || is_tag(cp) || cp == kCancelTag) return EmojiClass::kComponent;
  if (in_pictographic(cp)) return EmojiClass::kPictographic;
  return EmojiClass::kNone;
}

std::size_t emoji_cluster_length(std::u32string_view s, std::size_t pos) {
  if (pos >= s.size()) return 0;
  const char32_t cp = s[pos];

  if (is_keycap_base(cp)) {
    std::size_t i = skip_selector(s, pos + 1);
    if (i < s.size() && s[i] == kKeycap) return i + 1 - pos;
    return 0;
  }

  switch (classify_emoji(cp)) {
    case EmojiClass::kNone:
      return 0;
    case EmojiClass::kRegionalIndicator:
      if (pos + 1 < s.size() && classify_emoji(s[pos + 1]) == EmojiClass::kRegionalIndicator) return 2;
      return 1;
    case EmojiClass::kModifier:
    case EmojiClass::kComponent:
      return skip_selector(s, pos + 1) - pos;
    case EmojiClass::kPictographic:
      break;
  }

  // Pictographic base followed by optional decorations and ZWJ links.
  auto element_end = [&](std::size_t i) {
    i = skip_selector(s, i + 1);
    if (i < s.size() && classify_emoji(s[i]) == EmojiClass::kModifier) i = skip_selector(s, i + 1);
    return i;
  };
  std::size_t i = element_end(pos);
  if (i < s.size() && is_tag(s[i])) {
    std::size_t j = i;
    while (j < s.size() && is_tag(s[j])) ++j;
    if (j < s.size() && s[j] == kCancelTag) i = j + 1;
  }
  while (i + 1 < s.size() && s[i] == kZwj &&
         classify_emoji(s[i + 1]) == EmojiClass::kPictographic) {
    i = element_end(i + 1);
  }
  return i - pos;
}

}  // namespace armi::text
