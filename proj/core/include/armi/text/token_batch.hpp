// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "armi/text/vocabulary.hpp"

namespace armi::text {

// Row-major batch x max_len matrices.
struct TokenBatch {
  std::size_t batch_size = 0;
  std::size_t max_len = 0;
  std::vector<std::int64_t> ids;
  std::vector<std::uint8_t> padding_mask;  // 1 on real tokens
  std::vector<std::int64_t> segment_ids;   // 0: [CLS] text [SEP]; 1: emojis [SEP]
  std::vector<std::size_t> lengths;

  std::span<const std::int64_t> row_ids(std::size_t row) const {
    return std::span<const std::int64_t>(ids).subspan(row * max_len, max_len);
  }
};

// Number of whitespace tokens in a rendered input.
std::size_t rendered_length(const std::string& rendered);

// Tokenizes rendered inputs by whitespace and pads every row to max_len.
// Overlong rows lose trailing text tokens first; the emoji span is cut only
// when it alone exceeds max_len - 3. [CLS] and both [SEP]s always survive.
TokenBatch encode_batch(std::span<const std::string> rendered, const Vocabulary& vocab,
                        std::size_t max_len);

}  // namespace armi::text
