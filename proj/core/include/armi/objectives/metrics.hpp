// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace armi::objectives {

struct ClassRow {
  std::string label;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;

  friend bool operator==(const ClassRow&, const ClassRow&) = default;
};

struct MetricsReport {
  double accuracy = 0.0;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  std::size_t num_examples = 0;
  // One row per label of the label space, in label order.
  std::vector<ClassRow> per_class;
  // confusion[gold][pred]
  std::vector<std::vector<std::size_t>> confusion;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

// Per-class scores from the confusion matrix. A zero denominator gives 0;
// classes absent from `golds` are listed but left out of the macro means.
MetricsReport evaluate(std::span<const std::size_t> preds, std::span<const std::size_t> golds,
                       std::span<const std::string_view> label_names);

nlohmann::json to_json(const MetricsReport& report);
MetricsReport metrics_from_json(const nlohmann::json& json);

// Aligned classification report: one row per label with Precision, Recall,
// F1 and Support, then accuracy and macro averages.
std::string format_report(const MetricsReport& report, std::string_view title = {});

}  // namespace armi::objectives
