// SPDX-License-Identifier: Apache-2.0
#include "armi/math/parameters.hpp"

#include "armi/errors.hpp"

namespace armi {

Tensor ParameterSet::add(std::string name, Shape shape, std::vector<double> values) {
  if (index_.count(name)) throw ConfigError("duplicate parameter name: " + name);
  Tensor t(std::move(shape), std::move(values), true);
  index_.emplace(name, entries_.size());
  entries_.push_back({std::move(name), t});
  return t;
}

Tensor ParameterSet::get(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) throw ConfigError("unknown parameter: " + std::string(name));
  return entries_[it->second].tensor;
}

bool ParameterSet::contains(std::string_view name) const {
  return index_.count(std::string(name)) != 0;
}

std::vector<Tensor> ParameterSet::tensors() const {
  std::vector<Tensor> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.tensor);
  return out;
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.tensor.size();
  return n;
}

void ParameterSet::zero_grad() {
  for (auto& e : entries_) e.tensor.zero_grad();
}

}  // namespace armi
