// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "armi/math/parameters.hpp"
#include "armi/math/rng.hpp"
#include "armi/math/tensor.hpp"
#include "armi/text/token_batch.hpp"

namespace armi::model {

struct EncoderConfig {
  std::size_t num_layers = 8;
  std::size_t model_dim = 64;
  std::size_t num_heads = 4;
  std::size_t ffn_dim = 256;
  std::size_t max_len = 64;
  std::size_t vocab_size = 0;
  std::uint64_t seed = 0;

  // Throws ConfigError. `needs_vertical` enforces the depth required by the
  // vertical attention stage.
  void validate(bool needs_vertical) const;

  friend bool operator==(const EncoderConfig&, const EncoderConfig&) = default;
};

inline constexpr double kInitStddev = 0.02;

struct EncoderOutput {
  // num_layers + 1 tensors of [batch x len x d]; index 0 is the embedding
  // layer output.
  std::vector<Tensor> hidden_states;
  // [batch x d]: position 0 of the last hidden state.
  Tensor cls_final;
  // Per layer [batch x heads x len x len], filled only on request.
  std::vector<std::vector<double>> attention_probabilities;
};

// Token + learned position + segment embeddings, then post-LN transformer
// blocks (self-attention, residual, norm, GELU feed-forward, residual, norm).
class Encoder {
 public:
  Encoder() = default;
  // Registers and initializes the encoder parameters in `params`: weights
  // ~ N(0, 0.02) from `rng`, biases 0, norm gains 1.
  Encoder(const EncoderConfig& config, ParameterSet& params, Rng& rng);

  EncoderOutput encode(const text::TokenBatch& batch, bool record_attention = false) const;

  const EncoderConfig& config() const { return config_; }

 private:
  struct Block {
    Tensor wq, bq, wk, bk, wv, bv, wo, bo;
    Tensor attn_gain, attn_bias;
    Tensor w1, b1, w2, b2;
    Tensor ffn_gain, ffn_bias;
  };

  EncoderConfig config_;
  Tensor token_embedding_, position_embedding_, segment_embedding_;
  Tensor embed_gain_, embed_bias_;
  std::vector<Block> blocks_;
};

}  // namespace armi::model
