// SPDX-License-Identifier: Apache-2.0
#include "armi/model/label_space.hpp"

#include <string>

#include "armi/errors.hpp"

namespace armi {

std::optional<std::size_t> LabelSpace::category_index(std::string_view name) {
  for (std::size_t i = 0; i < kCategories.size(); ++i) {
    if (kCategories[i] == name) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> LabelSpace::task1_index(std::string_view name) {
  for (std::size_t i = 0; i < kTask1.size(); ++i) {
    if (kTask1[i] == name) return i;
  }
  return std::nullopt;
}

std::string_view LabelSpace::category_name(std::size_t index) {
  if (index >= kCategories.size()) throw DataError("category index out of range: " + std::to_string(index));
  return kCategories[index];
}

std::string_view LabelSpace::task1_name(std::size_t index) {
  if (index >= kTask1.size()) throw DataError("task-1 label out of range: " + std::to_string(index));
  return kTask1[index];
}

}  // namespace armi
