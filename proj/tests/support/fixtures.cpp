// SPDX-License-Identifier: Apache-2.0
#include "fixtures.hpp"

#include <string>

#include "armi/math/rng.hpp"

namespace armi::test_support {

std::filesystem::path fixture_path(std::string_view name) {
  return std::filesystem::path(ARMI_FIXTURE_DIR) / name;
}

std::filesystem::path scratch_dir(std::string_view tag) {
  const auto dir = std::filesystem::path(ARMI_TEST_TMP_DIR) / tag;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::vector<text::RawExample> imbalanced_dataset(std::span<const std::size_t> counts, std::uint64_t seed) {
  constexpr std::size_t kKeywords = 6;
  constexpr std::size_t kFillers = 40;
  Rng rng(seed, 0xda7a);
  std::vector<text::RawExample> rows;
  std::size_t next_id = 0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    for (std::size_t i = 0; i < counts[c]; ++i) {
      std::vector<std::string> words;
      if (rng.uniform() < 0.85) words.push_back("k" + std::to_string(c) + "_" + std::to_string(rng.below(kKeywords)));
      if (rng.uniform() < 0.25) {
        const auto other = (c + 1 + rng.below(counts.size() - 1)) % counts.size();
        words.push_back("k" + std::to_string(other) + "_" + std::to_string(rng.below(kKeywords)));
      }
      const auto fillers = 3 + rng.below(4);
      for (std::uint64_t f = 0; f < fillers; ++f) words.push_back("f" + std::to_string(rng.below(kFillers)));
      rng.shuffle(std::span<std::string>(words));
      std::string text;
      for (const auto& w : words) text += (text.empty() ? "" : " ") + w;
      text::RawExample ex;
      ex.id = "imb" + std::to_string(next_id++);
      ex.text = text;
      ex.task1_label = c == 0 ? 0 : 1;
      ex.task2_label = c;
      rows.push_back(std::move(ex));
    }
  }
  rng.shuffle(std::span<text::RawExample>(rows));
  return rows;
}

harness::TrainConfig small_train_config(std::string_view architecture, model::TaskSet tasks) {
  auto c = harness::toy_profile();
  c.architecture = std::string(architecture);
  c.tasks = tasks;
  c.encoder.num_layers = 2;
  c.encoder.model_dim = 16;
  c.encoder.num_heads = 2;
  c.encoder.ffn_dim = 32;
  c.encoder.max_len = 24;
  return c;
}

text::TokenBatch token_batch(const std::vector<std::vector<std::int64_t>>& rows, std::size_t max_len,
                             const std::vector<std::size_t>& emoji_start) {
  text::TokenBatch b;
  b.batch_size = rows.size();
  b.max_len = max_len;
  b.ids.assign(rows.size() * max_len, 0);
  b.padding_mask.assign(rows.size() * max_len, 0);
  b.segment_ids.assign(rows.size() * max_len, 0);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t t = 0; t < rows[r].size(); ++t) {
      b.ids[r * max_len + t] = rows[r][t];
      b.padding_mask[r * max_len + t] = 1;
      if (!emoji_start.empty() && t >= emoji_start[r]) b.segment_ids[r * max_len + t] = 1;
    }
    b.lengths.push_back(rows[r].size());
  }
  return b;
}

Tensor random_tensor(const Shape& shape, std::uint64_t seed, double stddev, bool requires_grad) {
  Rng rng(seed, 0x7e57);
  std::vector<double> values(shape_size(shape));
  for (auto& v : values) v = rng.normal(0.0, stddev);
  return Tensor(shape, std::move(values), requires_grad);
}

std::vector<double> naive_matmul(std::span<const double> a, std::span<const double> b, std::size_t m,
                                 std::size_t k, std::size_t n) {
  std::vector<double> out(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += a[i * k + p] * b[p * n + j];
      out[i * n + j] = acc;
    }
  }
  return out;
}

}  // namespace armi::test_support
