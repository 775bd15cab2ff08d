// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "armi/objectives/metrics.hpp"

namespace armi::harness {

// Metrics for whichever tasks a model covers.
struct TaskMetrics {
  std::optional<objectives::MetricsReport> task1;
  std::optional<objectives::MetricsReport> task2;

  friend bool operator==(const TaskMetrics&, const TaskMetrics&) = default;
};

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  std::optional<double> task1_loss;
  std::optional<double> task2_loss;
  double total_loss = 0.0;
  std::optional<TaskMetrics> dev;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct RunReport {
  std::string architecture;
  std::string tasks;
  std::string task2_loss;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::size_t train_size = 0;
  std::size_t dev_size = 0;
  std::vector<std::size_t> train_category_counts;
  std::vector<double> alpha;
  std::vector<EpochRecord> epochs;
  std::size_t checkpoint_epoch = 0;
  std::optional<TaskMetrics> final_train;
  std::optional<TaskMetrics> test;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

nlohmann::json to_json(const TaskMetrics& metrics);
TaskMetrics task_metrics_from_json(const nlohmann::json& json);
std::string format_task_metrics(const TaskMetrics& metrics, const std::string& heading);

nlohmann::json to_json(const RunReport& report);
RunReport run_report_from_json(const nlohmann::json& json);
std::string format_run_report(const RunReport& report);

}  // namespace armi::harness
