// SPDX-License-Identifier: Apache-2.0
#include "armi/model/heads.hpp"

#include <string>

#include "armi/errors.hpp"
#include "armi/model/label_space.hpp"

namespace armi::model {
namespace {

VerticalStage create_vertical(ParameterSet& params, const std::string& prefix, std::size_t d, Rng& rng) {
  VerticalStage stage;
  for (std::size_t k = 0; k < kVerticalLayers; ++k) {
    stage.layer_pools.push_back(
        AttentionPool::create(params, prefix + ".layer." + std::to_string(k), d, d, rng));
  }
  stage.aggregator = AttentionPool::create(params, prefix + ".aggregator", d, d, rng);
  return stage;
}

TaskHead create_head(const ModelSpec& spec, const std::string& task, std::size_t d,
                     std::size_t outputs, ParameterSet& params, Rng& rng) {
  TaskHead head;
  if (spec.head != HeadKind::kCls) {
    head.pool = AttentionPool::create(params, "head." + task + ".pool", d, d, rng);
  }
  if (spec.head == HeadKind::kVhatt && spec.per_task_vertical) {
    head.vertical = create_vertical(params, "vertical." + task, d, rng);
  }
  head.classifier =
      Linear::create(params, "head." + task + ".classifier", spec.classifier_width(d), outputs, rng);
  return head;
}

void require_head(const HeadSet& heads, HeadKind kind, const char* op) {
  if (heads.spec.head != kind) {
    throw ConfigError(std::string(op) + " called with a " + heads.spec.name() + " head set");
  }
}

TensorLogits classify(const HeadSet& heads, const Tensor& task1_input, const Tensor& task2_input) {
  TensorLogits out;
  if (heads.task1) {
    Tensor z = heads.task1->classifier(task1_input);
    out.task1 = reshape(z, {z.dim(0)});
  }
  if (heads.task2) out.task2 = heads.task2->classifier(task2_input);
  return out;
}

std::size_t encoder_depth(const EncoderOutput& enc) {
  if (enc.hidden_states.empty()) throw DataError("encoder output has no hidden states");
  return enc.hidden_states.size() - 1;
}

Tensor run_vertical(const VerticalStage& stage, const EncoderOutput& enc, Mask mask,
                    VerticalTrace* trace) {
  const auto layers = vertical_layer_indices(encoder_depth(enc));
  std::vector<Tensor> pooled;
  pooled.reserve(kVerticalLayers);
  for (std::size_t k = 0; k < kVerticalLayers; ++k) {
    pooled.push_back(attention_pool(stage.layer_pools[k], enc.hidden_states[layers[k]], mask).context);
  }
  Tensor stacked = stack_positions(pooled);
  const std::vector<std::uint8_t> all_valid(stacked.dim(0) * kVerticalLayers, 1);
  PoolOutput agg = attention_pool(stage.aggregator, stacked, all_valid);
  if (trace) {
    trace->layers_read.assign(layers.begin(), layers.end());
    trace->pooled = pooled;
    trace->aggregate = agg.context;
    trace->aggregate_weights = agg.weights;
  }
  return agg.context;
}

}  // namespace

HeadSet HeadSet::create(const ModelSpec& spec, std::size_t model_dim, ParameterSet& params, Rng& rng) {
  HeadSet heads;
  heads.spec = spec;
  if (spec.per_task_vertical && (spec.head != HeadKind::kVhatt || !spec.multi_task())) {
    throw ConfigError("per-task vertical stages apply to MT_VHATT only");
  }
  if (spec.head == HeadKind::kVhatt && !spec.per_task_vertical) {
    heads.shared_vertical = create_vertical(params, "vertical", model_dim, rng);
  }
  if (spec.has_task1()) heads.task1 = create_head(spec, "task1", model_dim, 1, params, rng);
  if (spec.has_task2()) {
    heads.task2 = create_head(spec, "task2", model_dim, LabelSpace::kNumCategories, params, rng);
  }
  return heads;
}

std::array<std::size_t, kVerticalLayers> vertical_layer_indices(std::size_t num_layers) {
  if (num_layers < kVerticalLayers + 1) {
    throw ConfigError("vertical attention needs num_layers >= 7 (six intermediate layers below the "
                      "excluded top layer), got " + std::to_string(num_layers));
  }
  std::array<std::size_t, kVerticalLayers> out{};
  for (std::size_t k = 0; k < kVerticalLayers; ++k) out[k] = num_layers - kVerticalLayers + k;
  return out;
}

TensorLogits forward_cls(const HeadSet& heads, const EncoderOutput& enc) {
  require_head(heads, HeadKind::kCls, "forward_cls");
  return classify(heads, enc.cls_final, enc.cls_final);
}

TensorLogits forward_att(const HeadSet& heads, const EncoderOutput& enc, Mask mask) {
  require_head(heads, HeadKind::kAtt, "forward_att");
  const Tensor& top = enc.hidden_states.back();
  auto input_for = [&](const std::optional<TaskHead>& head) -> Tensor {
    if (!head) return {};
    const Tensor parts[] = {attention_pool(*head->pool, top, mask).context, enc.cls_final};
    return concat_last(parts);
  };
  return classify(heads, input_for(heads.task1), input_for(heads.task2));
}

TensorLogits forward_vhatt(const HeadSet& heads, const EncoderOutput& enc, Mask mask,
                           VerticalTrace* trace) {
  require_head(heads, HeadKind::kVhatt, "forward_vhatt");
  const Tensor& top = enc.hidden_states.back();
  std::optional<Tensor> shared;
  if (heads.shared_vertical) shared = run_vertical(*heads.shared_vertical, enc, mask, trace);
  bool traced = shared.has_value();
  auto input_for = [&](const std::optional<TaskHead>& head) -> Tensor {
    if (!head) return {};
    Tensor aggregate;
    if (head->vertical) {
      aggregate = run_vertical(*head->vertical, enc, mask, traced ? nullptr : trace);
      traced = true;
    } else {
      aggregate = *shared;
    }
    const Tensor parts[] = {enc.cls_final, attention_pool(*head->pool, top, mask).context, aggregate};
    return concat_last(parts);
  };
  return classify(heads, input_for(heads.task1), input_for(heads.task2));
}

TensorLogits forward_heads(const HeadSet& heads, const EncoderOutput& enc, Mask mask,
                           VerticalTrace* trace) {
  switch (heads.spec.head) {
    case HeadKind::kCls:
      return forward_cls(heads, enc);
    case HeadKind::kAtt:
      return forward_att(heads, enc, mask);
    case HeadKind::kVhatt:
      return forward_vhatt(heads, enc, mask, trace);
  }
  throw ConfigError("unknown head kind");
}

}  // namespace armi::model
