// SPDX-License-Identifier: Apache-2.0
#include "armi/math/adam.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "armi/errors.hpp"

namespace armi {

AdamState make_adam_state(std::span<const std::size_t> sizes, AdamOptions options) {
  AdamState state;
  state.options = options;
  for (auto n : sizes) {
    state.first_moment.emplace_back(n, 0.0);
    state.second_moment.emplace_back(n, 0.0);
  }
  return state;
}

void adam_step(std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads, AdamState& state) {
  if (params.size() != grads.size() || params.size() != state.first_moment.size()) {
    throw DimensionError("adam_step: " + std::to_string(params.size()) + " parameters, " +
                         std::to_string(grads.size()) + " gradients, " +
                         std::to_string(state.first_moment.size()) + " moment buffers");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].size() != state.first_moment[i].size() ||
        (!grads[i].empty() && grads[i].size() != params[i].size())) {
      throw DimensionError("adam_step: parameter " + std::to_string(i) + " has " +
                           std::to_string(params[i].size()) + " values, gradient " +
                           std::to_string(grads[i].size()) + ", moments " +
                           std::to_string(state.first_moment[i].size()));
    }
  }

  const auto& opt = state.options;
  state.step_count += 1;
  const double t = static_cast<double>(state.step_count);
  const double correction1 = 1.0 - std::pow(opt.beta1, t);
  const double correction2 = 1.0 - std::pow(opt.beta2, t);

  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto g = grads[i];
    if (std::all_of(g.begin(), g.end(), [](double v) { return v == 0.0; })) continue;
    auto& m = state.first_moment[i];
    auto& v = state.second_moment[i];
    auto p = params[i];
    for (std::size_t j = 0; j < p.size(); ++j) {
      m[j] = opt.beta1 * m[j] + (1.0 - opt.beta1) * g[j];
      v[j] = opt.beta2 * v[j] + (1.0 - opt.beta2) * g[j] * g[j];
      const double m_hat = m[j] / correction1;
      const double v_hat = v[j] / correction2;
      p[j] -= opt.learning_rate * m_hat / (std::sqrt(v_hat) + opt.epsilon);
    }
  }
}

Adam::Adam(std::vector<Tensor> params, AdamOptions options) : params_(std::move(params)) {
  std::vector<std::size_t> sizes;
  for (const auto& p : params_) sizes.push_back(p.size());
  state_ = make_adam_state(sizes, options);
}

void Adam::step() {
  std::vector<std::span<double>> values;
  std::vector<std::span<const double>> grads;
  for (auto& p : params_) {
    values.push_back(p.mutable_values());
    grads.push_back(p.grad());
  }
  adam_step(values, grads, state_);
}

void Adam::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

}  // namespace armi
