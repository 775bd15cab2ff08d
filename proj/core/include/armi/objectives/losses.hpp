// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace armi::objectives {

struct FocalParams {
  double gamma = 2.0;
  // One weight per category, in LabelSpace order.
  std::vector<double> alpha;

  // gamma >= 0 and every alpha > 0; throws ConfigError.
  void validate(std::size_t num_classes) const;
};

// -[y log sigmoid(z) + (1-y) log(1 - sigmoid(z))] in the overflow-free form
// max(z, 0) - z y + log1p(exp(-|z|)).
double bce_loss(double logit, std::size_t y);
double bce_loss_grad(double logit, std::size_t y);

// -log softmax(logits)[y] via log-sum-exp.
double ce_loss(std::span<const double> logits, std::size_t y);

// -alpha_y (1 - p_y)^gamma log p_y with p = softmax(logits).
double focal_loss(std::span<const double> logits, std::size_t y, const FocalParams& params);
// d focal_loss / d logits, written into `grad` (same length as logits).
void focal_loss_grad(std::span<const double> logits, std::size_t y, const FocalParams& params,
                     std::span<double> grad);
void ce_loss_grad(std::span<const double> logits, std::size_t y, std::span<double> grad);

// alpha_y = (count of the most frequent label) / count_y. Every label must
// occur at least once.
std::vector<double> compute_alpha(std::span<const std::size_t> counts);

// task1 + lambda2 * task2, both already batch means.
double mtl_loss(double task1_loss, double task2_loss, double lambda2 = 1.0);

}  // namespace armi::objectives
