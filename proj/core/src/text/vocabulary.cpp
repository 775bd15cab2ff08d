// SPDX-License-Identifier: Apache-2.0
#include "armi/text/vocabulary.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "armi/errors.hpp"
#include "armi/text/preprocess.hpp"

namespace armi::text {

std::vector<std::string_view> split_whitespace(std::string_view text) {
  std::vector<std::string_view> out;
  auto is_ws = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f'; };
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_ws(text[i])) ++i;
    const std::size_t start = i;
    while (i < text.size() && !is_ws(text[i])) ++i;
    if (i > start) out.push_back(text.substr(start, i - start));
  }
  return out;
}

Vocabulary Vocabulary::build(std::span<const std::string> rendered_corpus, std::size_t min_count) {
  if (rendered_corpus.empty()) throw DataError("build_vocab: empty corpus");
  std::map<std::string, std::size_t, std::less<>> counts;
  for (const auto& line : rendered_corpus) {
    for (auto tok : split_whitespace(line)) {
      if (tok == kPadToken || tok == kUnkToken || tok == kClsToken || tok == kSepToken) continue;
      ++counts[std::string(tok)];
    }
  }
  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [tok, n] : counts) {
    if (n >= min_count) kept.emplace_back(tok, n);
  }
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  std::vector<std::string> tokens{std::string(kPadToken), std::string(kUnkToken),
                                  std::string(kClsToken), std::string(kSepToken)};
  for (auto& [tok, n] : kept) tokens.push_back(tok);
  return from_tokens(std::move(tokens));
}

Vocabulary Vocabulary::from_tokens(std::vector<std::string> tokens) {
  static const std::string_view kSpecials[] = {kPadToken, kUnkToken, kClsToken, kSepToken};
  if (tokens.size() < kNumSpecial) throw DataError("vocabulary is missing special tokens");
  for (std::size_t i = 0; i < kNumSpecial; ++i) {
    if (tokens[i] != kSpecials[i]) {
      throw DataError("vocabulary id " + std::to_string(i) + " must be " + std::string(kSpecials[i]) +
                      ", found '" + tokens[i] + "'");
    }
  }
  Vocabulary vocab;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto parts = split_whitespace(tokens[i]);
    if (parts.size() != 1 || parts.front().size() != tokens[i].size()) {
      throw DataError("vocabulary token " + std::to_string(i) + " is empty or contains whitespace");
    }
    if (!vocab.ids_.emplace(tokens[i], static_cast<std::int64_t>(i)).second) {
      throw DataError("duplicate vocabulary token '" + tokens[i] + "'");
    }
  }
  vocab.tokens_ = std::move(tokens);
  return vocab;
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open vocabulary file " + path.string());
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tokens.push_back(line);
  }
  return from_tokens(std::move(tokens));
}

void Vocabulary::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write vocabulary file " + path.string());
  for (const auto& t : tokens_) out << t << '\n';
  if (!out) throw DataError("failed writing vocabulary file " + path.string());
}

std::int64_t Vocabulary::id(std::string_view token) const {
  return find(token).value_or(kUnkId);
}

std::optional<std::int64_t> Vocabulary::find(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

const std::string& Vocabulary::token(std::int64_t id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw DataError("vocabulary id out of range: " + std::to_string(id));
  }
  return tokens_[static_cast<std::size_t>(id)];
}

}  // namespace armi::text
