// SPDX-License-Identifier: Apache-2.0
#include "armi/model/model.hpp"

#include <cmath>

#include "armi/errors.hpp"
#include "armi/math/rng.hpp"
#include "armi/model/label_space.hpp"

namespace armi::model {

std::size_t ModelSpec::classifier_width(std::size_t model_dim) const {
  switch (head) {
    case HeadKind::kCls:
      return model_dim;
    case HeadKind::kAtt:
      return 2 * model_dim;
    case HeadKind::kVhatt:
      return 3 * model_dim;
  }
  return 0;
}

std::string ModelSpec::name() const {
  return std::string(multi_task() ? "MT_" : "ST_") + std::string(to_string(head));
}

ModelSpec ModelSpec::parse(std::string_view name, TaskSet task) {
  if (name.size() < 4 || (name.substr(0, 3) != "ST_" && name.substr(0, 3) != "MT_")) {
    throw ConfigError("unknown architecture '" + std::string(name) + "'");
  }
  ModelSpec spec;
  const auto head = name.substr(3);
  if (head == "CLS") {
    spec.head = HeadKind::kCls;
  } else if (head == "ATT") {
    spec.head = HeadKind::kAtt;
  } else if (head == "VHATT") {
    spec.head = HeadKind::kVhatt;
  } else {
    throw ConfigError("unknown architecture '" + std::string(name) + "'");
  }
  const bool multi = name.substr(0, 3) == "MT_";
  if (multi && task != TaskSet::kBoth) {
    throw ConfigError(std::string(name) + " trains both tasks; task must be 'both'");
  }
  if (!multi && task == TaskSet::kBoth) {
    throw ConfigError(std::string(name) + " is single-task; choose task1 or task2");
  }
  spec.tasks = task;
  return spec;
}

std::string_view to_string(TaskSet tasks) {
  switch (tasks) {
    case TaskSet::kTask1:
      return "task1";
    case TaskSet::kTask2:
      return "task2";
    case TaskSet::kBoth:
      return "both";
  }
  return "";
}

TaskSet parse_task_set(std::string_view text) {
  if (text == "task1") return TaskSet::kTask1;
  if (text == "task2") return TaskSet::kTask2;
  if (text == "both") return TaskSet::kBoth;
  throw ConfigError("unknown task selection '" + std::string(text) + "' (task1, task2, both)");
}

std::string_view to_string(HeadKind head) {
  switch (head) {
    case HeadKind::kCls:
      return "CLS";
    case HeadKind::kAtt:
      return "ATT";
    case HeadKind::kVhatt:
      return "VHATT";
  }
  return "";
}

std::size_t TaskLogits::size() const {
  if (task1) return task1->size();
  if (task2) return task2->size();
  return 0;
}

TaskLogits to_values(const TensorLogits& logits) {
  TaskLogits out;
  if (logits.task1) {
    const auto v = logits.task1->values();
    out.task1.emplace(v.begin(), v.end());
  }
  if (logits.task2) {
    const std::size_t B = logits.task2->dim(0);
    const std::size_t K = logits.task2->dim(1);
    const auto v = logits.task2->values();
    out.task2.emplace();
    for (std::size_t b = 0; b < B; ++b) {
      out.task2->emplace_back(v.begin() + static_cast<std::ptrdiff_t>(b * K),
                              v.begin() + static_cast<std::ptrdiff_t>((b + 1) * K));
    }
  }
  return out;
}

double stable_sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::size_t argmax(std::span<const double> values) {
  if (values.empty()) throw DimensionError("argmax of an empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

Predictions predict(const TaskLogits& logits, double threshold) {
  Predictions out;
  if (logits.task1) {
    out.task1.emplace();
    for (double z : *logits.task1) out.task1->push_back(stable_sigmoid(z) >= threshold ? 1 : 0);
  }
  if (logits.task2) {
    out.task2.emplace();
    for (const auto& row : *logits.task2) out.task2->push_back(argmax(row));
  }
  return out;
}

MultiTaskModel::MultiTaskModel(const EncoderConfig& config, const ModelSpec& spec)
    : config_(config), spec_(spec) {
  config_.validate(spec_.head == HeadKind::kVhatt);
  Rng rng(config_.seed, /*stream=*/0x1417);
  encoder_ = Encoder(config_, params_, rng);
  heads_ = HeadSet::create(spec_, config_.model_dim, params_, rng);
}

ForwardResult MultiTaskModel::forward(const text::TokenBatch& batch, VerticalTrace* trace) const {
  ForwardResult result;
  result.encoder = encoder_.encode(batch);
  result.logits = forward_heads(heads_, result.encoder, batch.padding_mask, trace);
  return result;
}

TaskLogits MultiTaskModel::infer(const text::TokenBatch& batch) const {
  NoGradGuard no_grad;
  return to_values(forward(batch).logits);
}

}  // namespace armi::model
