// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include "armi/math/parameters.hpp"
#include "armi/math/tensor.hpp"

namespace armi {

struct GradCheckOptions {
  // Balances rounding in f(x +- h) against the O(h^2) truncation term.
  double step = 1e-4;
  double tolerance = 1e-4;
  // Relative error is |analytic - numeric| / max(|analytic|, |numeric|, floor);
  // the floor keeps coordinates whose true gradient is ~0 from dividing
  // rounding noise by rounding noise.
  double denominator_floor = 1e-6;
};

struct GradCheckReport {
  std::size_t coordinates = 0;
  double max_relative_error = 0.0;
  std::string worst_parameter;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  bool passed = false;
};

// Compares reverse-mode gradients of the scalar returned by `loss` against
// central differences (f(x+h) - f(x-h)) / 2h over every coordinate of every
// parameter. `loss` must be deterministic and rebuild its graph per call.
GradCheckReport gradient_check(const std::function<Tensor()>& loss, const ParameterSet& params,
                               const GradCheckOptions& options = {});

}  // namespace armi
