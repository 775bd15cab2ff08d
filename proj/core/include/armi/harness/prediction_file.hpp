// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "armi/model/model.hpp"

namespace armi::harness {

// Rows of a prediction file. Columns: id, misogyny, category, task1_logit,
// task2_logits (comma-joined), optionally followed by task1_prob and
// task2_probs. Fields of a task the model does not cover are empty.
struct PredictionTable {
  std::vector<std::string> ids;
  model::TaskLogits logits;
  std::optional<std::vector<double>> task1_probability;
  std::optional<std::vector<std::vector<double>>> task2_probability;
};

// Labels are derived from the logits with model::predict. Numbers use the
// shortest representation that parses back to the same double.
void write_predictions(const std::filesystem::path& path, const PredictionTable& table);
// Reads the logit columns; label and probability columns are not trusted.
PredictionTable read_predictions(const std::filesystem::path& path);

std::string format_double(double value);

}  // namespace armi::harness
