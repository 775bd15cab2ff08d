// SPDX-License-Identifier: Apache-2.0
#include "armi/objectives/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "armi/errors.hpp"

namespace armi::objectives {
namespace {

void check_same_shape(const model::TaskLogits& ref, const model::TaskLogits& other, std::size_t member) {
  const std::string where = "ensemble: member " + std::to_string(member);
  if (ref.task1.has_value() != other.task1.has_value() || ref.task2.has_value() != other.task2.has_value()) {
    throw DimensionError(where + " covers different tasks than member 0");
  }
  if (ref.task1 && ref.task1->size() != other.task1->size()) {
    throw DimensionError(where + " has " + std::to_string(other.task1->size()) + " task-1 logits, expected " +
                         std::to_string(ref.task1->size()));
  }
  if (ref.task2) {
    if (ref.task2->size() != other.task2->size()) {
      throw DimensionError(where + " has " + std::to_string(other.task2->size()) +
                           " task-2 rows, expected " + std::to_string(ref.task2->size()));
    }
    for (std::size_t i = 0; i < ref.task2->size(); ++i) {
      if ((*ref.task2)[i].size() != (*other.task2)[i].size()) {
        throw DimensionError(where + " row " + std::to_string(i) + " has a different number of classes");
      }
    }
  }
}

// first + sum(x_m - first) / M, exact when all members agree.
void accumulate_mean(std::span<double> out, std::span<const std::span<const double>> rows) {
  const double m = static_cast<double>(rows.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double first = rows[0][j];
    double diff = 0.0;
    for (std::size_t k = 1; k < rows.size(); ++k) diff += rows[k][j] - first;
    out[j] = first + diff / m;
  }
}

}  // namespace

std::vector<double> softmax_values(std::span<const double> logits) {
  if (logits.empty()) throw DimensionError("softmax of an empty vector");
  const double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double total = 0.0;
  for (std::size_t j = 0; j < logits.size(); ++j) {
    out[j] = std::exp(logits[j] - mx);
    total += out[j];
  }
  for (double& v : out) v /= total;
  return out;
}

EnsembleResult ensemble_logits(std::span<const model::TaskLogits> members) {
  if (members.empty()) throw ConfigError("ensemble: at least one member is required");
  for (std::size_t m = 1; m < members.size(); ++m) check_same_shape(members[0], members[m], m);

  EnsembleResult result;
  std::vector<std::span<const double>> rows(members.size());
  if (members[0].task1) {
    auto& mean = result.mean.task1.emplace(members[0].task1->size());
    for (std::size_t m = 0; m < members.size(); ++m) rows[m] = *members[m].task1;
    accumulate_mean(mean, rows);
    auto& prob = result.task1_probability.emplace();
    for (double z : mean) prob.push_back(model::stable_sigmoid(z));
  }
  if (members[0].task2) {
    const std::size_t n = members[0].task2->size();
    auto& mean = result.mean.task2.emplace(n);
    auto& prob = result.task2_probability.emplace();
    for (std::size_t i = 0; i < n; ++i) {
      mean[i].resize((*members[0].task2)[i].size());
      for (std::size_t m = 0; m < members.size(); ++m) rows[m] = (*members[m].task2)[i];
      accumulate_mean(mean[i], rows);
      prob.push_back(softmax_values(mean[i]));
    }
  }
  result.predictions = model::predict(result.mean);
  return result;
}

}  // namespace armi::objectives
