// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "armi/math/parameters.hpp"
#include "armi/model/encoder.hpp"
#include "armi/model/heads.hpp"
#include "armi/model/model_spec.hpp"
#include "armi/text/token_batch.hpp"

namespace armi::model {

// Plain logit values per example; which fields are present follows the
// ModelSpec's task set.
struct TaskLogits {
  std::optional<std::vector<double>> task1;
  std::optional<std::vector<std::vector<double>>> task2;

  std::size_t size() const;
  friend bool operator==(const TaskLogits&, const TaskLogits&) = default;
};

TaskLogits to_values(const TensorLogits& logits);

struct Predictions {
  std::optional<std::vector<std::size_t>> task1;
  std::optional<std::vector<std::size_t>> task2;
};

double stable_sigmoid(double z);
// Index of the maximum; ties resolve to the lowest index.
std::size_t argmax(std::span<const double> values);

// Task 1: label 1 iff sigmoid(logit) >= threshold. Task 2: argmax.
Predictions predict(const TaskLogits& logits, double threshold = 0.5);

struct ForwardResult {
  EncoderOutput encoder;
  TensorLogits logits;
};

// Encoder plus the heads of one of the six architectures. Parameters are
// created in a fixed order from EncoderConfig::seed.
class MultiTaskModel {
 public:
  MultiTaskModel(const EncoderConfig& config, const ModelSpec& spec);

  MultiTaskModel(MultiTaskModel&&) noexcept = default;
  MultiTaskModel& operator=(MultiTaskModel&&) noexcept = default;
  MultiTaskModel(const MultiTaskModel&) = delete;
  MultiTaskModel& operator=(const MultiTaskModel&) = delete;

  ForwardResult forward(const text::TokenBatch& batch, VerticalTrace* trace = nullptr) const;
  // Gradient-free forward returning plain values.
  TaskLogits infer(const text::TokenBatch& batch) const;

  const EncoderConfig& encoder_config() const { return config_; }
  const ModelSpec& spec() const { return spec_; }
  const ParameterSet& parameters() const { return params_; }
  ParameterSet& parameters() { return params_; }
  const HeadSet& heads() const { return heads_; }
  const Encoder& encoder() const { return encoder_; }

 private:
  EncoderConfig config_;
  ModelSpec spec_;
  ParameterSet params_;
  Encoder encoder_;
  HeadSet heads_;
};

}  // namespace armi::model
