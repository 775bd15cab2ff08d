// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "armi/math/ops.hpp"
#include "armi/math/parameters.hpp"
#include "armi/math/rng.hpp"
#include "armi/model/attention_pool.hpp"
#include "armi/model/encoder.hpp"
#include "armi/model/model_spec.hpp"

namespace armi::model {

inline constexpr std::size_t kVerticalLayers = 6;

// Six per-layer pools plus the aggregator that attends over their outputs.
struct VerticalStage {
  std::vector<AttentionPool> layer_pools;
  AttentionPool aggregator;
};

struct TaskHead {
  std::optional<AttentionPool> pool;       // ATT / VHATT
  std::optional<VerticalStage> vertical;   // VHATT with per-task vertical stages
  Linear classifier;
};

struct HeadSet {
  ModelSpec spec;
  std::optional<TaskHead> task1;  // 1 output
  std::optional<TaskHead> task2;  // LabelSpace::kNumCategories outputs
  std::optional<VerticalStage> shared_vertical;

  static HeadSet create(const ModelSpec& spec, std::size_t model_dim, ParameterSet& params, Rng& rng);
};

struct TensorLogits {
  std::optional<Tensor> task1;  // [B]
  std::optional<Tensor> task2;  // [B x K]
};

// Encoder layers read by the vertical pools: the six directly below the top.
std::array<std::size_t, kVerticalLayers> vertical_layer_indices(std::size_t num_layers);

// Records what the vertical stage touched during one forward pass.
struct VerticalTrace {
  std::vector<std::size_t> layers_read;
  std::vector<Tensor> pooled;  // per-layer contexts, same order as layers_read
  Tensor aggregate;            // [B x d]
  Tensor aggregate_weights;    // [B x 6]
};

TensorLogits forward_cls(const HeadSet& heads, const EncoderOutput& enc);
TensorLogits forward_att(const HeadSet& heads, const EncoderOutput& enc, Mask mask);
TensorLogits forward_vhatt(const HeadSet& heads, const EncoderOutput& enc, Mask mask,
                           VerticalTrace* trace = nullptr);

// Dispatches on heads.spec.head.
TensorLogits forward_heads(const HeadSet& heads, const EncoderOutput& enc, Mask mask,
                           VerticalTrace* trace = nullptr);

}  // namespace armi::model
