// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string_view>

namespace armi::text {

// Identifier of the bundled inventory; bump when the ranges change.
inline constexpr std::string_view kEmojiTableVersion = "armi-emoji-15.0-r1";

enum class EmojiClass {
  kNone,
  kPictographic,       // Extended_Pictographic
  kModifier,           // skin tones U+1F3FB..U+1F3FF
  kRegionalIndicator,  // U+1F1E6..U+1F1FF
  kComponent,          // U+20E3 keycap, tag characters
};

EmojiClass classify_emoji(char32_t cp);

// True for every codepoint that belongs to the bundled table, i.e. a
// codepoint that may never survive emoji extraction.
inline bool is_emoji_codepoint(char32_t cp) { return classify_emoji(cp) != EmojiClass::kNone; }

// Length (in codepoints) of the emoji cluster starting at `pos`, or 0 if no
// cluster starts there. Clusters cover ZWJ chains, skin-tone modifiers,
// presentation selectors, flag pairs, tag sequences and keycaps.
std::size_t emoji_cluster_length(std::u32string_view text, std::size_t pos);

}  // namespace armi::text
