// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace armi {

// Fixed label inventory of both tasks. The category order is the row order of
// the classification report and the order of task-2 logits, class weights and
// counts everywhere in the code base.
struct LabelSpace {
  static constexpr std::size_t kNumCategories = 8;
  static constexpr std::array<std::string_view, kNumCategories> kCategories{
      "None",      "Damning",          "Derailing",
      "Discredit", "Dominance",        "Sexual harassment",
      "Stereotyping & objectification", "Threat of violence"};
  // Task-1 values as spelled in dataset files: 0 = none, 1 = misogyny.
  static constexpr std::array<std::string_view, 2> kTask1{"none", "misogyny"};

  static std::optional<std::size_t> category_index(std::string_view name);
  static std::optional<std::size_t> task1_index(std::string_view name);
  static std::string_view category_name(std::size_t index);
  static std::string_view task1_name(std::size_t index);
};

}  // namespace armi
