// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace armi::text {

struct RawExample {
  std::string id;
  std::string text;
  std::optional<std::size_t> task1_label;  // 0 none, 1 misogyny
  std::optional<std::size_t> task2_label;  // index into LabelSpace::kCategories

  friend bool operator==(const RawExample&, const RawExample&) = default;
};

struct LoadedDataset {
  std::vector<RawExample> examples;
  // Rows whose task-1 and task-2 labels disagree; reported, never repaired.
  std::vector<std::string> warnings;
  bool labeled = false;
};

// Reads the UTF-8 TSV layout `id<TAB>text<TAB>misogyny<TAB>category` with a
// header row; unlabeled files carry only `id<TAB>text`. Unknown labels and
// malformed rows raise DataError with the 1-based line number.
LoadedDataset load_tsv(const std::filesystem::path& path);

void write_tsv(const std::filesystem::path& path, std::span<const RawExample> examples);

struct TrainDevSplit {
  std::vector<RawExample> train;
  std::vector<RawExample> dev;
};

// Stratified by task-2 label (unlabeled rows form their own stratum). The
// training side receives exactly floor(fraction * N) rows, apportioned to
// strata by largest remainder; a singleton stratum always goes to train.
// Within each stratum the seed picks which rows go where; both outputs keep
// input order.
TrainDevSplit split_train_dev(std::span<const RawExample> examples, double fraction,
                              std::uint64_t seed);

}  // namespace armi::text
