// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>

#include "armi/errors.hpp"
#include "armi/model/label_space.hpp"
#include "armi/text/dataset.hpp"
#include "fixtures.hpp"

using namespace armi;
using namespace armi::text;

namespace {

std::filesystem::path write_file(const std::string& name, const std::string& body) {
  const auto dir = test_support::scratch_dir("dataset_" + name);
  const auto path = dir / (name + ".tsv");
  std::ofstream(path, std::ios::binary) << body;
  return path;
}

std::vector<RawExample> stratified(std::span<const std::size_t> counts) {
  std::vector<RawExample> out;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    for (std::size_t i = 0; i < counts[c]; ++i) {
      out.push_back({"r" + std::to_string(out.size()), "t", c == 0 ? 0u : 1u, c});
    }
  }
  return out;
}

std::vector<std::string> ids_of(const std::vector<RawExample>& rows) {
  std::vector<std::string> ids;
  for (const auto& r : rows) ids.push_back(r.id);
  return ids;
}

}  // namespace

TEST(LoadTsv, ThreeRowFile) {
  const auto path = write_file("three",
                               "id\ttext\tmisogyny\tcategory\n"
                               "1\tنص أول\tnone\tNone\n"
                               "2\tنص ثان\tmisogyny\tDamning\n"
                               "3\tthird\tmisogyny\tStereotyping & objectification\n");
  const auto d = load_tsv(path);
  ASSERT_EQ(d.examples.size(), 3u);
  EXPECT_TRUE(d.labeled);
  EXPECT_EQ(d.examples[0].id, "1");
  EXPECT_EQ(d.examples[0].text, "نص أول");
  EXPECT_EQ(d.examples[1].task1_label, 1u);
  EXPECT_EQ(d.examples[1].task2_label, LabelSpace::category_index("Damning"));
  EXPECT_EQ(d.examples[2].task2_label, 6u);
  EXPECT_TRUE(d.warnings.empty());
}

TEST(LoadTsv, RejectsUnknownCategoryWithRow) {
  const auto path = write_file("sarcasm", "id\ttext\tmisogyny\tcategory\n1\tx\tnone\tNone\n7\ty\tmisogyny\tSarcasm\n");
  try {
    load_tsv(path);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find(":3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("Sarcasm"), std::string::npos) << msg;
  }
}

TEST(LoadTsv, MalformedRowsAndHeaders) {
  EXPECT_THROW(load_tsv(write_file("cols", "id\ttext\tmisogyny\tcategory\n1\tx\tnone\n")), DataError);
  EXPECT_THROW(load_tsv(write_file("header", "text\tid\n1\tx\n")), DataError);
  EXPECT_THROW(load_tsv(write_file("empty", "")), DataError);
  EXPECT_THROW(load_tsv("/nonexistent/file.tsv"), DataError);
}

TEST(LoadTsv, UnlabeledBomCrlfAndInconsistencyWarnings) {
  const auto u = load_tsv(write_file("unlabeled", "\xEF\xBB\xBFid\ttext\r\na\tx y\r\nb\tz\r\n"));
  ASSERT_EQ(u.examples.size(), 2u);
  EXPECT_FALSE(u.labeled);
  EXPECT_EQ(u.examples[0].text, "x y");
  EXPECT_FALSE(u.examples[0].task1_label.has_value());
  const auto w = load_tsv(write_file("inconsistent", "id\ttext\tmisogyny\tcategory\n1\tx\tnone\tDamning\n"));
  ASSERT_EQ(w.examples.size(), 1u);
  EXPECT_EQ(w.warnings.size(), 1u);
}

TEST(LoadTsv, WriteThenReadRoundTrips) {
  const auto rows = stratified(std::vector<std::size_t>{2, 1, 1, 0, 0, 0, 0, 1});
  const auto dir = test_support::scratch_dir("dataset_roundtrip");
  write_tsv(dir / "rows.tsv", rows);
  EXPECT_EQ(load_tsv(dir / "rows.tsv").examples, rows);
}

TEST(LoadTsv, BundledFixtureShape) {
  const auto d = load_tsv(test_support::fixture_path("synthetic64.tsv"));
  ASSERT_EQ(d.examples.size(), 64u);
  std::vector<std::size_t> counts(8, 0);
  for (const auto& e : d.examples) ++counts[*e.task2_label];
  EXPECT_EQ(counts, (std::vector<std::size_t>{15, 7, 7, 7, 7, 7, 7, 7}));
  EXPECT_TRUE(d.warnings.empty());
}

TEST(SplitTrainDev, PaperScaleArithmetic) {
  const std::size_t counts[] = {3061, 669, 105, 2868, 219, 66, 652, 226};
  const auto rows = stratified(counts);
  ASSERT_EQ(rows.size(), 7866u);
  const auto s = split_train_dev(rows, 0.9, 1);
  EXPECT_EQ(s.train.size(), 7079u);
  EXPECT_EQ(s.dev.size(), 787u);
}

TEST(SplitTrainDev, SmallCasesAndSingletons) {
  const auto two = stratified(std::vector<std::size_t>{5, 5});
  const auto s = split_train_dev(two, 0.9, 3);
  EXPECT_EQ(s.train.size(), 9u);
  EXPECT_EQ(s.dev.size(), 1u);
  const auto single = stratified(std::vector<std::size_t>{4, 1});
  const auto t = split_train_dev(single, 0.5, 3);
  EXPECT_TRUE(std::any_of(t.train.begin(), t.train.end(), [](const RawExample& e) { return e.task2_label == 1u; }));
  EXPECT_THROW(split_train_dev(std::vector<RawExample>{}, 0.9, 1), DataError);
}

TEST(SplitTrainDev, DeterministicPartition) {
  const std::size_t counts[] = {40, 13, 3, 22, 7, 1, 9, 5};
  const auto rows = stratified(counts);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto a = split_train_dev(rows, 0.9, seed);
    const auto b = split_train_dev(rows, 0.9, seed);
    EXPECT_EQ(ids_of(a.train), ids_of(b.train));
    auto all = ids_of(a.train);
    const auto dev = ids_of(a.dev);
    all.insert(all.end(), dev.begin(), dev.end());
    std::sort(all.begin(), all.end());
    auto expected = ids_of(rows);
    std::sort(expected.begin(), expected.end());
    EXPECT_EQ(all, expected);
    EXPECT_TRUE(std::adjacent_find(all.begin(), all.end()) == all.end());
  }
  EXPECT_NE(ids_of(split_train_dev(rows, 0.9, 1).dev), ids_of(split_train_dev(rows, 0.9, 2).dev));
}
