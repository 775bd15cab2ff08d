// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <span>

#include "armi/harness/prediction_file.hpp"
#include "armi/harness/run_report.hpp"

namespace armi::harness {

// Scores a checkpoint on a labeled TSV. When `vocab_path` is given it must
// match the vocabulary stored in the checkpoint.
TaskMetrics evaluate_checkpoint(const std::filesystem::path& checkpoint, const std::filesystem::path& data,
                                const std::optional<std::filesystem::path>& vocab_path = std::nullopt);

// Writes one prediction row per input row, in input order.
PredictionTable predict_file(const std::filesystem::path& checkpoint, const std::filesystem::path& data,
                             const std::filesystem::path& out);

// Averages the logits of prediction files that list the same ids in the same
// order and cover the same tasks, then writes the merged file with
// probabilities.
PredictionTable ensemble_files(std::span<const std::filesystem::path> inputs, const std::filesystem::path& out);

}  // namespace armi::harness
