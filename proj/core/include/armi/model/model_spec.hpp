// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace armi::model {

enum class HeadKind { kCls, kAtt, kVhatt };
enum class TaskSet { kTask1, kTask2, kBoth };

// One of ST_CLS, ST_ATT, ST_VHATT (single task) or MT_CLS, MT_ATT, MT_VHATT
// (both tasks). Single-task specs name which task they serve.
struct ModelSpec {
  HeadKind head = HeadKind::kAtt;
  TaskSet tasks = TaskSet::kBoth;
  // MT_VHATT only: one vertical stage per task instead of a shared one.
  bool per_task_vertical = false;

  bool multi_task() const { return tasks == TaskSet::kBoth; }
  bool has_task1() const { return tasks != TaskSet::kTask2; }
  bool has_task2() const { return tasks != TaskSet::kTask1; }
  // d, 2d or 3d.
  std::size_t classifier_width(std::size_t model_dim) const;
  std::string name() const;

  // "MT_ATT" etc.; ST_* names require `task` to be task1 or task2 and MT_*
  // names require both.
  static ModelSpec parse(std::string_view name, TaskSet task);

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

std::string_view to_string(TaskSet tasks);
TaskSet parse_task_set(std::string_view text);
std::string_view to_string(HeadKind head);

}  // namespace armi::model
