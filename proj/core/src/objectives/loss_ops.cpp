// SPDX-License-Identifier: Apache-2.0
#include "armi/objectives/loss_ops.hpp"

#include <string>
#include <vector>

#include "armi/errors.hpp"
#include "armi/math/ops.hpp"

namespace armi::objectives {
namespace {

template <typename LossFn, typename GradFn>
Tensor per_row_mean(const char* name, const Tensor& logits, std::span<const std::size_t> labels,
                    LossFn loss, GradFn grad) {
  if (logits.rank() != 2 || logits.dim(0) != labels.size() || labels.empty()) {
    throw DimensionError(std::string(name) + ": logits " + shape_to_string(logits.shape()) + " for " +
                         std::to_string(labels.size()) + " labels");
  }
  const std::size_t B = logits.dim(0);
  const std::size_t K = logits.dim(1);
  const auto v = logits.values();
  double total = 0.0;
  for (std::size_t b = 0; b < B; ++b) total += loss(v.subspan(b * K, K), labels[b]);
  std::vector<std::size_t> kept(labels.begin(), labels.end());
  return Tensor::from_op(name, Shape{1}, {total / static_cast<double>(B)}, {logits},
                         [logits, kept, B, K, grad](std::span<const double>, std::span<const double> gy) {
                           auto g = logits.grad_buffer();
                           const auto v = logits.values();
                           std::vector<double> row(K);
                           const double w = gy[0] / static_cast<double>(B);
                           for (std::size_t b = 0; b < B; ++b) {
                             grad(v.subspan(b * K, K), kept[b], std::span<double>(row));
                             for (std::size_t j = 0; j < K; ++j) g[b * K + j] += w * row[j];
                           }
                         });
}

}  // namespace

Tensor binary_cross_entropy(const Tensor& logits, std::span<const std::size_t> labels) {
  if (logits.rank() != 1) {
    throw DimensionError("binary_cross_entropy: logits must be [B], got " + shape_to_string(logits.shape()));
  }
  return per_row_mean(
      "binary_cross_entropy", reshape(logits, {logits.dim(0), 1}), labels,
      [](std::span<const double> z, std::size_t y) { return bce_loss(z[0], y); },
      [](std::span<const double> z, std::size_t y, std::span<double> g) { g[0] = bce_loss_grad(z[0], y); });
}

Tensor cross_entropy(const Tensor& logits, std::span<const std::size_t> labels) {
  return per_row_mean(
      "cross_entropy", logits, labels,
      [](std::span<const double> z, std::size_t y) { return ce_loss(z, y); },
      [](std::span<const double> z, std::size_t y, std::span<double> g) { ce_loss_grad(z, y, g); });
}

Tensor focal(const Tensor& logits, std::span<const std::size_t> labels, const FocalParams& params) {
  if (logits.rank() == 2) params.validate(logits.dim(1));
  return per_row_mean(
      "focal", logits, labels,
      [&params](std::span<const double> z, std::size_t y) { return focal_loss(z, y, params); },
      [params](std::span<const double> z, std::size_t y, std::span<double> g) {
        focal_loss_grad(z, y, params, g);
      });
}

Tensor combine_task_losses(const Tensor& task1, const Tensor& task2, double lambda2) {
  if (!(lambda2 >= 0.0)) throw ConfigError("mtl_loss: lambda2 must be >= 0");
  return add(task1, scale(task2, lambda2));
}

}  // namespace armi::objectives
