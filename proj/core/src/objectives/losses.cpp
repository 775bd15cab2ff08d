// SPDX-License-Identifier: Apache-2.0
#include "armi/objectives/losses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "armi/errors.hpp"
#include "armi/model/label_space.hpp"

namespace armi::objectives {
namespace {

void check_label(std::span<const double> logits, std::size_t y) {
  if (logits.empty()) throw DimensionError("loss on an empty logit vector");
  if (y >= logits.size()) {
    throw DataError("label " + std::to_string(y) + " outside [0, " + std::to_string(logits.size()) + ")");
  }
}

double log_sum_exp(std::span<const double> logits) {
  const double peak = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double z : logits) total += std::exp(z - peak);
  return peak + std::log(total);
}

struct SoftmaxAt {
  double log_p;  // log p_y
  double p;      // p_y
  double q;      // 1 - p_y, summed from the other classes for accuracy near p_y = 1
};

SoftmaxAt softmax_at(std::span<const double> logits, std::size_t y) {
  const double lse = log_sum_exp(logits);
  SoftmaxAt s{logits[y] - lse, 0.0, 0.0};
  s.p = std::exp(s.log_p);
  for (std::size_t j = 0; j < logits.size(); ++j) {
    if (j != y) s.q += std::exp(logits[j] - lse);
  }
  return s;
}

}  // namespace

void FocalParams::validate(std::size_t num_classes) const {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ConfigError("focal loss: gamma must be >= 0");
  if (alpha.size() != num_classes) {
    throw ConfigError("focal loss: expected " + std::to_string(num_classes) + " class weights, got " +
                      std::to_string(alpha.size()));
  }
  for (double a : alpha) {
    if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("focal loss: class weights must be > 0");
  }
}

double bce_loss(double logit, std::size_t y) {
  if (y > 1) throw DataError("binary label must be 0 or 1, got " + std::to_string(y));
  return std::max(logit, 0.0) - logit * static_cast<double>(y) + std::log1p(std::exp(-std::abs(logit)));
}

double bce_loss_grad(double logit, std::size_t y) {
  const double s = logit >= 0 ? 1.0 / (1.0 + std::exp(-logit)) : std::exp(logit) / (1.0 + std::exp(logit));
  return s - static_cast<double>(y);
}

double ce_loss(std::span<const double> logits, std::size_t y) {
  check_label(logits, y);
  return log_sum_exp(logits) - logits[y];
}

void ce_loss_grad(std::span<const double> logits, std::size_t y, std::span<double> grad) {
  check_label(logits, y);
  const double lse = log_sum_exp(logits);
  for (std::size_t j = 0; j < logits.size(); ++j) {
    grad[j] = std::exp(logits[j] - lse) - (j == y ? 1.0 : 0.0);
  }
}

double focal_loss(std::span<const double> logits, std::size_t y, const FocalParams& params) {
  check_label(logits, y);
  params.validate(logits.size());
  const SoftmaxAt s = softmax_at(logits, y);
  return -params.alpha[y] * std::pow(s.q, params.gamma) * s.log_p;
}

void focal_loss_grad(std::span<const double> logits, std::size_t y, const FocalParams& params,
                     std::span<double> grad) {
  check_label(logits, y);
  params.validate(logits.size());
  if (grad.size() != logits.size()) throw DimensionError("focal_loss_grad: gradient buffer size mismatch");
  const SoftmaxAt s = softmax_at(logits, y);
  const double gamma = params.gamma;
  // dL/dp_y * dp_y/dz_j collapses to alpha (A - q^gamma)(delta_jy - p_j) with
  // A = gamma q^(gamma-1) p log p, whose limit at q = 0 is 0.
  const double modulating = std::pow(s.q, gamma);
  const double a = (gamma > 0.0 && s.q > 0.0) ? gamma * std::pow(s.q, gamma - 1.0) * s.p * s.log_p : 0.0;
  const double factor = params.alpha[y] * (a - modulating);
  const double neg_lse = s.log_p - logits[y];
  for (std::size_t j = 0; j < logits.size(); ++j) {
    const double indicator_minus_p = (j == y) ? s.q : -std::exp(logits[j] + neg_lse);
    grad[j] = factor * indicator_minus_p;
  }
}

std::vector<double> compute_alpha(std::span<const std::size_t> counts) {
  if (counts.empty()) throw DataError("compute_alpha: no class counts");
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) {
      const std::string label = counts.size() == LabelSpace::kNumCategories
                                    ? std::string(LabelSpace::category_name(i))
                                    : "class " + std::to_string(i);
      throw DataError("compute_alpha: label '" + label +
                      "' has no training instances; use a stratified split or merge the fixture so "
                      "every category occurs in the training data");
    }
  }
  const double dominant = static_cast<double>(*std::max_element(counts.begin(), counts.end()));
  std::vector<double> alpha;
  alpha.reserve(counts.size());
  for (auto c : counts) alpha.push_back(dominant / static_cast<double>(c));
  return alpha;
}

double mtl_loss(double task1_loss, double task2_loss, double lambda2) {
  if (!(lambda2 >= 0.0)) throw ConfigError("mtl_loss: lambda2 must be >= 0");
  if (!std::isfinite(task1_loss) || !std::isfinite(task2_loss)) {
    throw NumericalError("mtl_loss: non-finite task loss");
  }
  return task1_loss + lambda2 * task2_loss;
}

}  // namespace armi::objectives
