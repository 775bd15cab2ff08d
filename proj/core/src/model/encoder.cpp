// SPDX-License-Identifier: Apache-2.0
#include "armi/model/encoder.hpp"

#include <string>

#include "armi/errors.hpp"
#include "armi/math/ops.hpp"

namespace armi::model {
namespace {

Tensor normal_param(ParameterSet& params, const std::string& name, Shape shape, Rng& rng) {
  std::vector<double> values(shape_size(shape));
  for (auto& v : values) v = rng.normal(0.0, kInitStddev);
  return params.add(name, std::move(shape), std::move(values));
}

Tensor const_param(ParameterSet& params, const std::string& name, Shape shape, double value) {
  const auto n = shape_size(shape);
  return params.add(name, std::move(shape), std::vector<double>(n, value));
}

}  // namespace

void EncoderConfig::validate(bool needs_vertical) const {
  if (num_layers == 0) throw ConfigError("encoder: num_layers must be positive");
  if (model_dim == 0 || num_heads == 0 || ffn_dim == 0) {
    throw ConfigError("encoder: model_dim, num_heads and ffn_dim must be positive");
  }
  if (model_dim % num_heads != 0) {
    throw ConfigError("encoder: model_dim " + std::to_string(model_dim) + " is not divisible by " +
                      std::to_string(num_heads) + " heads");
  }
  if (max_len < 3) throw ConfigError("encoder: max_len must be at least 3");
  if (vocab_size < 4) throw ConfigError("encoder: vocab_size must cover the 4 special tokens");
  if (needs_vertical && num_layers < 7) {
    throw ConfigError("encoder: vertical attention needs num_layers >= 7 (six intermediate layers "
                      "below the excluded top layer), got " + std::to_string(num_layers));
  }
}

Encoder::Encoder(const EncoderConfig& config, ParameterSet& params, Rng& rng) : config_(config) {
  config_.validate(false);
  const std::size_t d = config_.model_dim;
  token_embedding_ = normal_param(params, "encoder.embeddings.token", {config_.vocab_size, d}, rng);
  position_embedding_ = normal_param(params, "encoder.embeddings.position", {config_.max_len, d}, rng);
  segment_embedding_ = normal_param(params, "encoder.embeddings.segment", {2, d}, rng);
  embed_gain_ = const_param(params, "encoder.embeddings.norm.gain", {d}, 1.0);
  embed_bias_ = const_param(params, "encoder.embeddings.norm.bias", {d}, 0.0);

  for (std::size_t l = 0; l < config_.num_layers; ++l) {
    const std::string p = "encoder.layer." + std::to_string(l) + ".";
    Block b;
    b.wq = normal_param(params, p + "attention.query.weight", {d, d}, rng);
    b.bq = const_param(params, p + "attention.query.bias", {d}, 0.0);
    b.wk = normal_param(params, p + "attention.key.weight", {d, d}, rng);
    b.bk = const_param(params, p + "attention.key.bias", {d}, 0.0);
    b.wv = normal_param(params, p + "attention.value.weight", {d, d}, rng);
    b.bv = const_param(params, p + "attention.value.bias", {d}, 0.0);
    b.wo = normal_param(params, p + "attention.output.weight", {d, d}, rng);
    b.bo = const_param(params, p + "attention.output.bias", {d}, 0.0);
    b.attn_gain = const_param(params, p + "attention.norm.gain", {d}, 1.0);
    b.attn_bias = const_param(params, p + "attention.norm.bias", {d}, 0.0);
    b.w1 = normal_param(params, p + "ffn.intermediate.weight", {d, config_.ffn_dim}, rng);
    b.b1 = const_param(params, p + "ffn.intermediate.bias", {config_.ffn_dim}, 0.0);
    b.w2 = normal_param(params, p + "ffn.output.weight", {config_.ffn_dim, d}, rng);
    b.b2 = const_param(params, p + "ffn.output.bias", {d}, 0.0);
    b.ffn_gain = const_param(params, p + "ffn.norm.gain", {d}, 1.0);
    b.ffn_bias = const_param(params, p + "ffn.norm.bias", {d}, 0.0);
    blocks_.push_back(std::move(b));
  }
}

EncoderOutput Encoder::encode(const text::TokenBatch& batch, bool record_attention) const {
  const std::size_t B = batch.batch_size;
  const std::size_t T = batch.max_len;
  if (B == 0) throw DataError("encode: empty batch");
  if (T > config_.max_len) {
    throw DataError("encode: sequence length " + std::to_string(T) + " exceeds max_len " +
                    std::to_string(config_.max_len));
  }
  for (auto id : batch.ids) {
    if (id < 0 || static_cast<std::size_t>(id) >= config_.vocab_size) {
      throw DataError("encode: token id " + std::to_string(id) + " outside vocabulary of " +
                      std::to_string(config_.vocab_size));
    }
  }

  std::vector<std::int64_t> positions(B * T);
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t t = 0; t < T; ++t) positions[b * T + t] = static_cast<std::int64_t>(t);
  }
  const Shape prefix{B, T};
  Tensor x = add(add(embedding(token_embedding_, batch.ids, prefix),
                     embedding(position_embedding_, positions, prefix)),
                 embedding(segment_embedding_, batch.segment_ids, prefix));
  x = layer_norm(x, embed_gain_, embed_bias_);

  EncoderOutput out;
  out.hidden_states.reserve(blocks_.size() + 1);
  out.hidden_states.push_back(x);
  const Mask mask(batch.padding_mask);
  for (const auto& blk : blocks_) {
    Tensor q = add_bias(matmul(x, blk.wq), blk.bq);
    Tensor k = add_bias(matmul(x, blk.wk), blk.bk);
    Tensor v = add_bias(matmul(x, blk.wv), blk.bv);
    std::vector<double>* probs = nullptr;
    if (record_attention) probs = &out.attention_probabilities.emplace_back();
    Tensor attended = multi_head_attention(q, k, v, mask, config_.num_heads, probs);
    attended = add_bias(matmul(attended, blk.wo), blk.bo);
    x = layer_norm(add(x, attended), blk.attn_gain, blk.attn_bias);
    Tensor hidden = gelu(add_bias(matmul(x, blk.w1), blk.b1));
    Tensor ffn = add_bias(matmul(hidden, blk.w2), blk.b2);
    x = layer_norm(add(x, ffn), blk.ffn_gain, blk.ffn_bias);
    out.hidden_states.push_back(x);
  }
  out.cls_final = select_position(out.hidden_states.back(), 0);
  return out;
}

}  // namespace armi::model
