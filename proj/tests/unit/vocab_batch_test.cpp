// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <map>

#include "armi/errors.hpp"
#include "armi/math/rng.hpp"
#include "armi/text/token_batch.hpp"
#include "armi/text/vocabulary.hpp"
#include "fixtures.hpp"

using namespace armi;
using namespace armi::text;

TEST(Vocabulary, SpecialsThenCountOrder) {
  const std::vector<std::string> corpus{"a a b"};
  const auto v = Vocabulary::build(corpus, 1);
  EXPECT_EQ(v.tokens(), (std::vector<std::string>{"[PAD]", "[UNK]", "[CLS]", "[SEP]", "a", "b"}));
  const auto v2 = Vocabulary::build(corpus, 2);
  EXPECT_EQ(v2.size(), 5u);
  EXPECT_EQ(v2.id("b"), Vocabulary::kUnkId);
  EXPECT_THROW(Vocabulary::build(std::vector<std::string>{}, 1), DataError);
}

TEST(Vocabulary, TiesBreakLexicographicallyAgainstSortOracle) {
  Rng rng(4);
  std::vector<std::string> corpus;
  for (int line = 0; line < 50; ++line) {
    std::string s = "[CLS]";
    for (int w = 0; w < 8; ++w) s += " t" + std::to_string(rng.below(30));
    corpus.push_back(s + " [SEP] [SEP]");
  }
  std::map<std::string, int> counts;
  for (const auto& s : corpus) {
    for (auto tok : split_whitespace(s)) {
      if (tok != "[CLS]" && tok != "[SEP]") ++counts[std::string(tok)];
    }
  }
  std::vector<std::pair<int, std::string>> oracle;
  for (const auto& [t, c] : counts) oracle.emplace_back(-c, t);
  std::sort(oracle.begin(), oracle.end());
  const auto v = Vocabulary::build(corpus, 1);
  ASSERT_EQ(v.size(), oracle.size() + 4);
  for (std::size_t i = 0; i < oracle.size(); ++i) EXPECT_EQ(v.token(static_cast<std::int64_t>(i + 4)), oracle[i].second);
}

TEST(Vocabulary, RoundTripsAndPersists) {
  const std::vector<std::string> corpus{"[CLS] x y z x [SEP] 😂 [SEP]"};
  const auto v = Vocabulary::build(corpus);
  for (std::int64_t id = 0; id < static_cast<std::int64_t>(v.size()); ++id) EXPECT_EQ(v.id(v.token(id)), id);
  const auto dir = test_support::scratch_dir("vocab");
  v.save(dir / "vocab.txt");
  EXPECT_EQ(Vocabulary::load(dir / "vocab.txt"), v);
  EXPECT_THROW(Vocabulary::from_tokens({"[UNK]", "[PAD]", "[CLS]", "[SEP]"}), DataError);
  EXPECT_THROW(Vocabulary::from_tokens({"[PAD]", "[UNK]", "[CLS]", "[SEP]", "a", "a"}), DataError);
}

TEST(EncodeBatch, PadsMasksAndSegments) {
  const auto vocab = Vocabulary::build(std::vector<std::string>{"[CLS] a [SEP] [SEP]"});
  const std::vector<std::string> rows{"[CLS] a [SEP] [SEP]"};
  const auto b = encode_batch(rows, vocab, 6);
  EXPECT_EQ(b.ids, (std::vector<std::int64_t>{2, 4, 3, 3, 0, 0}));
  EXPECT_EQ(b.padding_mask, (std::vector<std::uint8_t>{1, 1, 1, 1, 0, 0}));
  EXPECT_EQ(b.segment_ids, (std::vector<std::int64_t>{0, 0, 0, 1, 0, 0}));
  EXPECT_EQ(b.lengths, (std::vector<std::size_t>{4}));
  const std::vector<std::string> unk{"[CLS] zzz [SEP] [SEP]"};
  EXPECT_EQ(encode_batch(unk, vocab, 4).ids[1], Vocabulary::kUnkId);
  EXPECT_THROW(encode_batch(rows, vocab, 2), ConfigError);
  const std::vector<std::string> bad{"a [SEP] [SEP]"};
  EXPECT_THROW(encode_batch(bad, vocab, 6), DataError);
}

TEST(EncodeBatch, TruncatesTextBeforeEmojis) {
  const std::vector<std::string> rows{"[CLS] t1 t2 t3 t4 t5 t6 [SEP] e1 e2 [SEP]"};
  const auto vocab = Vocabulary::build(rows);
  for (std::size_t max_len = 3; max_len <= 13; ++max_len) {
    const auto b = encode_batch(rows, vocab, max_len);
    const std::size_t budget = max_len - 3;
    const std::size_t emojis = std::min<std::size_t>(2, budget);
    const std::size_t text = std::min<std::size_t>(6, budget - emojis);
    ASSERT_EQ(b.lengths[0], text + emojis + 3) << max_len;
    EXPECT_EQ(b.ids[0], Vocabulary::kClsId);
    EXPECT_EQ(b.ids[text + 1], Vocabulary::kSepId);
    EXPECT_EQ(b.ids[b.lengths[0] - 1], Vocabulary::kSepId);
    for (std::size_t i = 0; i < text; ++i) EXPECT_EQ(b.ids[1 + i], vocab.id("t" + std::to_string(i + 1)));
    for (std::size_t i = 0; i < emojis; ++i) {
      EXPECT_EQ(b.ids[text + 2 + i], vocab.id("e" + std::to_string(i + 1)));
      EXPECT_EQ(b.segment_ids[text + 2 + i], 1);
    }
  }
}

TEST(EncodeBatch, MaskMarksExactlyTheNonPadPositions) {
  const std::vector<std::string> rows{"[CLS] a b [SEP] [SEP]", "[CLS] [SEP] x [SEP]", "[CLS] a a a a [SEP] [SEP]"};
  const auto vocab = Vocabulary::build(rows);
  const auto b = encode_batch(rows, vocab, 7);
  for (std::size_t i = 0; i < b.ids.size(); ++i) {
    EXPECT_EQ(b.padding_mask[i] == 1, b.ids[i] != Vocabulary::kPadId) << i;
  }
  for (std::size_t r = 0; r < 3; ++r) {
    EXPECT_EQ(b.row_ids(r)[0], Vocabulary::kClsId);
    EXPECT_EQ(b.row_ids(r)[b.lengths[r] - 1], Vocabulary::kSepId);
  }
}
