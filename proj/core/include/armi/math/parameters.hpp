// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "armi/math/tensor.hpp"

namespace armi {

// Named trainable tensors kept in declaration order. The order is part of the
// checkpoint format and of the optimizer's moment layout.
class ParameterSet {
 public:
  struct Entry {
    std::string name;
    Tensor tensor;
  };

  // Registers a leaf tensor that requires grad. Duplicate names are rejected.
  Tensor add(std::string name, Shape shape, std::vector<double> values);
  Tensor get(std::string_view name) const;
  bool contains(std::string_view name) const;

  const std::vector<Entry>& entries() const { return entries_; }
  std::vector<Tensor> tensors() const;
  std::size_t size() const { return entries_.size(); }
  std::size_t scalar_count() const;
  void zero_grad();

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace armi
