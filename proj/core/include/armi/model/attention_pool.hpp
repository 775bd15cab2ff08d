// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include "armi/math/ops.hpp"
#include "armi/math/parameters.hpp"
#include "armi/math/rng.hpp"

namespace armi::model {

// Additive attention: score_t = u . tanh(W h_t + b), softmax over unmasked
// positions, context = sum_t weight_t h_t.
struct AttentionPool {
  Tensor projection;  // [d x d_a]
  Tensor bias;        // [d_a]
  Tensor context;     // [d_a x 1]

  static AttentionPool create(ParameterSet& params, const std::string& prefix, std::size_t d,
                              std::size_t d_attn, Rng& rng);
};

struct PoolOutput {
  Tensor context;  // [B x d]
  Tensor weights;  // [B x T]; exactly 0 on masked positions
};

PoolOutput attention_pool(const AttentionPool& pool, const Tensor& tokens, Mask mask);

// Plain affine layer y = x W + b.
struct Linear {
  Tensor weight;  // [in x out]
  Tensor bias;    // [out]

  static Linear create(ParameterSet& params, const std::string& prefix, std::size_t in,
                       std::size_t out, Rng& rng);
  Tensor operator()(const Tensor& x) const;
};

}  // namespace armi::model
