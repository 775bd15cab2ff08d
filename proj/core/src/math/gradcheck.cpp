// SPDX-License-Identifier: Apache-2.0
#include "armi/math/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "armi/errors.hpp"

namespace armi {

GradCheckReport gradient_check(const std::function<Tensor()>& loss, const ParameterSet& params,
                               const GradCheckOptions& options) {
  auto evaluate = [&]() {
    NoGradGuard no_grad;
    const double value = loss().item();
    if (!std::isfinite(value)) throw NumericalError("gradient_check: loss is not finite");
    return value;
  };

  for (const auto& e : params.entries()) {
    for (double v : e.tensor.values()) {
      if (!std::isfinite(v)) throw NumericalError("gradient_check: parameter " + e.name + " is not finite");
    }
  }

  for (auto t : params.tensors()) t.zero_grad();
  Tensor root = loss();
  if (!std::isfinite(root.item())) throw NumericalError("gradient_check: loss is not finite");
  root.backward();

  GradCheckReport report;
  for (const auto& e : params.entries()) {
    Tensor tensor = e.tensor;
    std::vector<double> analytic(tensor.size(), 0.0);
    if (tensor.has_grad()) {
      std::copy(tensor.grad().begin(), tensor.grad().end(), analytic.begin());
    }
    auto values = tensor.mutable_values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double original = values[i];
      values[i] = original + options.step;
      const double plus = evaluate();
      values[i] = original - options.step;
      const double minus = evaluate();
      values[i] = original;
      const double numeric = (plus - minus) / (2.0 * options.step);
      const double denom =
          std::max({std::abs(analytic[i]), std::abs(numeric), options.denominator_floor});
      const double rel = std::abs(analytic[i] - numeric) / denom;
      ++report.coordinates;
      if (report.coordinates == 1 || rel > report.max_relative_error) {
        report.max_relative_error = rel;
        report.worst_parameter = e.name;
        report.worst_index = i;
        report.worst_analytic = analytic[i];
        report.worst_numeric = numeric;
      }
    }
  }
  for (auto t : params.tensors()) t.zero_grad();
  report.passed = report.max_relative_error < options.tolerance;
  return report;
}

}  // namespace armi
