// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>

namespace armi::text {

// Malformed bytes decode to U+FFFD, one per offending byte.
std::u32string decode_utf8(std::string_view bytes);
std::string encode_utf8(std::u32string_view codepoints);
void append_utf8(std::string& out, char32_t cp);

bool is_space(char32_t cp);

}  // namespace armi::text
