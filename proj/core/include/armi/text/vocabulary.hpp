// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace armi::text {

// Splits on ASCII whitespace.
std::vector<std::string_view> split_whitespace(std::string_view text);

// Token <-> id mapping. Ids 0..3 are always [PAD], [UNK], [CLS], [SEP].
class Vocabulary {
 public:
  static constexpr std::int64_t kPadId = 0;
  static constexpr std::int64_t kUnkId = 1;
  static constexpr std::int64_t kClsId = 2;
  static constexpr std::int64_t kSepId = 3;
  static constexpr std::size_t kNumSpecial = 4;

  // Whitespace tokens seen at least `min_count` times, ordered by descending
  // count then ascending byte order, after the specials.
  static Vocabulary build(std::span<const std::string> rendered_corpus, std::size_t min_count = 1);
  // Tokens listed in id order; the four specials must lead.
  static Vocabulary from_tokens(std::vector<std::string> tokens);

  // One token per line; the line number (from 0) is the id.
  static Vocabulary load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  std::int64_t id(std::string_view token) const;  // [UNK] when absent
  std::optional<std::int64_t> find(std::string_view token) const;
  const std::string& token(std::int64_t id) const;
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) { return a.tokens_ == b.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::int64_t> ids_;
};

}  // namespace armi::text
