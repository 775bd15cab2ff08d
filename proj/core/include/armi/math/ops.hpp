// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "armi/math/tensor.hpp"

namespace armi {

// Position masks are row-major 0/1 bytes; 1 marks a real (unpadded) position.
using Mask = std::span<const std::uint8_t>;

// a: [m x k] (any rank >= 2; leading axes are flattened into rows), b: [k x n].
Tensor matmul(const Tensor& a, const Tensor& b);

Tensor add(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& x, double factor);
// Broadcasts bias over the last axis of x.
Tensor add_bias(const Tensor& x, const Tensor& bias);

Tensor tanh(const Tensor& x);
Tensor sigmoid(const Tensor& x);
// Exact (erf) form.
Tensor gelu(const Tensor& x);

// Max-subtracted softmax along `axis`.
Tensor softmax(const Tensor& x, std::size_t axis);

// Normalizes over the last axis: gain * (x - mean) / sqrt(var + eps) + bias.
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps = 1e-12);

// Gathers rows of table [V x d]; output shape is `prefix` + [d].
Tensor embedding(const Tensor& table, std::span<const std::int64_t> ids, const Shape& prefix);

Tensor reshape(const Tensor& x, Shape shape);
// Concatenates along the last axis; leading shapes must agree.
Tensor concat_last(std::span<const Tensor> parts);
// x: [B x T x d] -> [B x d] at sequence position t.
Tensor select_position(const Tensor& x, std::size_t t);
// n tensors [B x d] -> [B x n x d].
Tensor stack_positions(std::span<const Tensor> parts);

// scores: [B x T]. Masked positions receive exactly zero weight; a row with
// no unmasked position is an error.
Tensor masked_softmax(const Tensor& scores, Mask mask);
// h: [B x T x d], weights: [B x T] -> [B x d].
Tensor weighted_sum(const Tensor& h, const Tensor& weights);

Tensor sum(const Tensor& x);
Tensor mean(const Tensor& x);

// Scaled dot-product self-attention split over `num_heads` heads.
// q, k, v: [B x T x d]; key positions with mask 0 are excluded. When
// `probabilities` is non-null it receives the [B x H x T x T] attention
// weights.
Tensor multi_head_attention(const Tensor& q, const Tensor& k, const Tensor& v, Mask key_mask,
                            std::size_t num_heads, std::vector<double>* probabilities = nullptr);

}  // namespace armi
