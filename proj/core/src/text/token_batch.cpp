// SPDX-License-Identifier: Apache-2.0
#include "armi/text/token_batch.hpp"

#include <algorithm>

#include "armi/errors.hpp"
#include "armi/text/preprocess.hpp"

namespace armi::text {

std::size_t rendered_length(const std::string& rendered) { return split_whitespace(rendered).size(); }

TokenBatch encode_batch(std::span<const std::string> rendered, const Vocabulary& vocab,
                        std::size_t max_len) {
  if (max_len < 3) throw ConfigError("encode_batch: max_len must be at least 3, got " + std::to_string(max_len));
  TokenBatch batch;
  batch.batch_size = rendered.size();
  batch.max_len = max_len;
  batch.ids.assign(rendered.size() * max_len, Vocabulary::kPadId);
  batch.padding_mask.assign(rendered.size() * max_len, 0);
  batch.segment_ids.assign(rendered.size() * max_len, 0);
  batch.lengths.assign(rendered.size(), 0);

  for (std::size_t row = 0; row < rendered.size(); ++row) {
    const auto tokens = split_whitespace(rendered[row]);
    const auto first_sep = std::find(tokens.begin(), tokens.end(), kSepToken);
    if (tokens.size() < 3 || tokens.front() != kClsToken || tokens.back() != kSepToken ||
        first_sep == tokens.end() || first_sep == tokens.end() - 1 ||
        std::count(tokens.begin(), tokens.end(), kSepToken) != 2 ||
        std::count(tokens.begin(), tokens.end(), kClsToken) != 1) {
      throw DataError("encode_batch: row " + std::to_string(row) +
                      " is not of the form '[CLS] text [SEP] emojis [SEP]'");
    }
    const auto text_begin = tokens.begin() + 1;
    const auto emoji_begin = first_sep + 1;
    const auto emoji_end = tokens.end() - 1;
    const std::size_t n_text = static_cast<std::size_t>(first_sep - text_begin);
    const std::size_t n_emoji = static_cast<std::size_t>(emoji_end - emoji_begin);
    const std::size_t budget = max_len - 3;
    const std::size_t keep_emoji = std::min(n_emoji, budget);
    const std::size_t keep_text = std::min(n_text, budget - keep_emoji);

    std::size_t pos = row * max_len;
    auto put = [&](std::int64_t id, std::int64_t segment) {
      batch.ids[pos] = id;
      batch.padding_mask[pos] = 1;
      batch.segment_ids[pos] = segment;
      ++pos;
    };
    put(Vocabulary::kClsId, 0);
    for (std::size_t i = 0; i < keep_text; ++i) put(vocab.id(text_begin[static_cast<std::ptrdiff_t>(i)]), 0);
    put(Vocabulary::kSepId, 0);
    for (std::size_t i = 0; i < keep_emoji; ++i) put(vocab.id(emoji_begin[static_cast<std::ptrdiff_t>(i)]), 1);
    put(Vocabulary::kSepId, 1);
    batch.lengths[row] = keep_text + keep_emoji + 3;
  }
  return batch;
}

}  // namespace armi::text
