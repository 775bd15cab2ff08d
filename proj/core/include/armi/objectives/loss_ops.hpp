// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>

#include "armi/math/tensor.hpp"
#include "armi/objectives/losses.hpp"

namespace armi::objectives {

// Batch-mean losses as differentiable graph nodes returning a scalar tensor.

// logits: [B]
Tensor binary_cross_entropy(const Tensor& logits, std::span<const std::size_t> labels);
// logits: [B x K]
Tensor cross_entropy(const Tensor& logits, std::span<const std::size_t> labels);
Tensor focal(const Tensor& logits, std::span<const std::size_t> labels, const FocalParams& params);

// task1 + lambda2 * task2.
Tensor combine_task_losses(const Tensor& task1, const Tensor& task2, double lambda2);

}  // namespace armi::objectives
