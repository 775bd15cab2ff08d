// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "armi/math/tensor.hpp"

namespace armi {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamOptions options;
  std::uint64_t step_count = 0;
  std::vector<std::vector<double>> first_moment;
  std::vector<std::vector<double>> second_moment;
};

// Creates zeroed moments sized after `sizes` (one entry per parameter tensor).
AdamState make_adam_state(std::span<const std::size_t> sizes, AdamOptions options);

// One bias-corrected Adam step. A parameter whose gradient is identically
// zero keeps both its value and its moments, so an all-zero gradient leaves
// every parameter untouched whatever the accumulated state.
void adam_step(std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads, AdamState& state);

// Adam over a fixed list of leaf tensors, reading their accumulated grads.
class Adam {
 public:
  Adam(std::vector<Tensor> params, AdamOptions options);

  void step();
  void zero_grad();
  const AdamState& state() const { return state_; }

 private:
  std::vector<Tensor> params_;
  AdamState state_;
};

}  // namespace armi
