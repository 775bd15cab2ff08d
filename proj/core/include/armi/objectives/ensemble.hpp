// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <span>
#include <vector>

#include "armi/model/model.hpp"

namespace armi::objectives {

struct EnsembleResult {
  model::TaskLogits mean;
  std::optional<std::vector<double>> task1_probability;
  std::optional<std::vector<std::vector<double>>> task2_probability;
  model::Predictions predictions;
};

// Element-wise mean of member logits per task, then sigmoid (task 1) and
// softmax (task 2). Members must cover the same tasks with the same shapes.
EnsembleResult ensemble_logits(std::span<const model::TaskLogits> members);

std::vector<double> softmax_values(std::span<const double> logits);

}  // namespace armi::objectives
