// SPDX-License-Identifier: Apache-2.0
#include "armi/harness/run_report.hpp"

#include <cstdio>

#include "armi/errors.hpp"

namespace armi::harness {
namespace {

template <typename T>
nlohmann::json optional_json(const std::optional<T>& value) {
  return value ? nlohmann::json(*value) : nlohmann::json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const nlohmann::json& json, const char* key) {
  if (!json.contains(key) || json.at(key).is_null()) return std::nullopt;
  return json.at(key).get<T>();
}

}  // namespace

nlohmann::json to_json(const TaskMetrics& metrics) {
  nlohmann::json out = nlohmann::json::object();
  out["task1"] = metrics.task1 ? objectives::to_json(*metrics.task1) : nlohmann::json(nullptr);
  out["task2"] = metrics.task2 ? objectives::to_json(*metrics.task2) : nlohmann::json(nullptr);
  return out;
}

TaskMetrics task_metrics_from_json(const nlohmann::json& json) {
  TaskMetrics out;
  if (json.contains("task1") && !json.at("task1").is_null()) {
    out.task1 = objectives::metrics_from_json(json.at("task1"));
  }
  if (json.contains("task2") && !json.at("task2").is_null()) {
    out.task2 = objectives::metrics_from_json(json.at("task2"));
  }
  return out;
}

std::string format_task_metrics(const TaskMetrics& metrics, const std::string& heading) {
  std::string out;
  if (metrics.task1) out += objectives::format_report(*metrics.task1, heading + " - Task 1") + "\n";
  if (metrics.task2) out += objectives::format_report(*metrics.task2, heading + " - Task 2") + "\n";
  return out;
}

nlohmann::json to_json(const RunReport& r) {
  nlohmann::json epochs = nlohmann::json::array();
  for (const auto& e : r.epochs) {
    epochs.push_back({{"epoch", e.epoch},
                      {"task1_loss", optional_json(e.task1_loss)},
                      {"task2_loss", optional_json(e.task2_loss)},
                      {"total_loss", e.total_loss},
                      {"dev", e.dev ? to_json(*e.dev) : nlohmann::json(nullptr)}});
  }
  return {{"architecture", r.architecture},
          {"tasks", r.tasks},
          {"task2_loss", r.task2_loss},
          {"seed", r.seed},
          {"config_hash", r.config_hash},
          {"train_size", r.train_size},
          {"dev_size", r.dev_size},
          {"train_category_counts", r.train_category_counts},
          {"alpha", r.alpha},
          {"epochs", epochs},
          {"checkpoint_epoch", r.checkpoint_epoch},
          {"final_train", r.final_train ? to_json(*r.final_train) : nlohmann::json(nullptr)},
          {"test", r.test ? to_json(*r.test) : nlohmann::json(nullptr)}};
}

RunReport run_report_from_json(const nlohmann::json& json) {
  try {
    RunReport r;
    r.architecture = json.at("architecture").get<std::string>();
    r.tasks = json.at("tasks").get<std::string>();
    r.task2_loss = json.at("task2_loss").get<std::string>();
    r.seed = json.at("seed").get<std::uint64_t>();
    r.config_hash = json.at("config_hash").get<std::string>();
    r.train_size = json.at("train_size").get<std::size_t>();
    r.dev_size = json.at("dev_size").get<std::size_t>();
    r.train_category_counts = json.at("train_category_counts").get<std::vector<std::size_t>>();
    r.alpha = json.at("alpha").get<std::vector<double>>();
    for (const auto& e : json.at("epochs")) {
      EpochRecord rec;
      rec.epoch = e.at("epoch").get<std::size_t>();
      rec.task1_loss = optional_from<double>(e, "task1_loss");
      rec.task2_loss = optional_from<double>(e, "task2_loss");
      rec.total_loss = e.at("total_loss").get<double>();
      if (!e.at("dev").is_null()) rec.dev = task_metrics_from_json(e.at("dev"));
      r.epochs.push_back(std::move(rec));
    }
    r.checkpoint_epoch = json.at("checkpoint_epoch").get<std::size_t>();
    if (!json.at("final_train").is_null()) r.final_train = task_metrics_from_json(json.at("final_train"));
    if (!json.at("test").is_null()) r.test = task_metrics_from_json(json.at("test"));
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("run report: ") + e.what());
  }
}

std::string format_run_report(const RunReport& r) {
  std::string out = r.architecture + " (" + r.tasks + ", task-2 loss " + r.task2_loss + "), seed " +
                    std::to_string(r.seed) + "\n";
  out += "train " + std::to_string(r.train_size) + " examples, dev " + std::to_string(r.dev_size) +
         " examples, checkpoint from epoch " + std::to_string(r.checkpoint_epoch) + "\n\n";
  out += "epoch  task1_loss  task2_loss  total_loss  dev_t1_f1  dev_t2_f1\n";
  const auto cell = [](const std::optional<double>& v, int width) {
    char buf[32];
    if (v) std::snprintf(buf, sizeof buf, "%*.6f", width, *v);
    else std::snprintf(buf, sizeof buf, "%*s", width, "-");
    return std::string(buf);
  };
  for (const auto& e : r.epochs) {
    std::optional<double> f1, f2;
    if (e.dev && e.dev->task1) f1 = e.dev->task1->macro_f1;
    if (e.dev && e.dev->task2) f2 = e.dev->task2->macro_f1;
    char head[16];
    std::snprintf(head, sizeof head, "%5zu", e.epoch);
    out += std::string(head) + "  " + cell(e.task1_loss, 10) + "  " + cell(e.task2_loss, 10) + "  " +
           cell(e.total_loss, 10) + "  " + cell(f1, 9) + "  " + cell(f2, 9) + "\n";
  }
  out += "\n";
  if (!r.epochs.empty() && r.epochs.back().dev) out += format_task_metrics(*r.epochs.back().dev, "Dev (last epoch)");
  if (r.final_train) out += format_task_metrics(*r.final_train, "Train (final model)");
  if (r.test) out += format_task_metrics(*r.test, "Test");
  return out;
}

}  // namespace armi::harness
