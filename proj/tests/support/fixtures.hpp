// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "armi/harness/config.hpp"
#include "armi/math/tensor.hpp"
#include "armi/text/dataset.hpp"
#include "armi/text/token_batch.hpp"

namespace armi::test_support {

std::filesystem::path fixture_path(std::string_view name);

// Fresh, empty directory under the test build tree.
std::filesystem::path scratch_dir(std::string_view tag);

// Per-category counts of the imbalanced fixture: 1000 None down to 20
// Derailing, a 50:1 dominant-to-rarest ratio over 2000 rows.
inline constexpr std::size_t kImbalancedCounts[8] = {1000, 300, 20, 250, 60, 40, 200, 130};

// Keyword-driven 8-class corpus. Each row usually carries one keyword of its
// category, sometimes a distractor keyword of another category, and a few
// shared filler words. Row order is shuffled by `seed`.
std::vector<text::RawExample> imbalanced_dataset(std::span<const std::size_t> counts, std::uint64_t seed);

// Small encoder (L=2, d=16) with the toy optimizer settings.
harness::TrainConfig small_train_config(std::string_view architecture, model::TaskSet tasks);

// Batch from explicit id rows, padded to `max_len`. Positions from
// `emoji_start[r]` on (when given) get segment 1.
text::TokenBatch token_batch(const std::vector<std::vector<std::int64_t>>& rows, std::size_t max_len,
                             const std::vector<std::size_t>& emoji_start = {});

Tensor random_tensor(const Shape& shape, std::uint64_t seed, double stddev = 1.0, bool requires_grad = true);

// Triple-loop reference product of row-major a[m x k] and b[k x n].
std::vector<double> naive_matmul(std::span<const double> a, std::span<const double> b, std::size_t m,
                                 std::size_t k, std::size_t n);

}  // namespace armi::test_support
