/*!
 * Copyright (c) 2026 the lipi authors. All rights reserved.
 * Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
 */
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace lipi {

/// The three classification tasks: A = 5-way language identification,
/// B = binary hate speech detection, C = 3-way hate speech target detection.
enum class TaskId { A, B, C };

std::string_view to_string(TaskId task);
TaskId task_from_string(std::string_view s);

/// Ordered label names; a label's code is its position in the list.
struct LabelSchema {
  TaskId task_id = TaskId::A;
  std::vector<std::string> labels;

  int num_classes() const { return static_cast<int>(labels.size()); }
  bool valid_code(int code) const { return code >= 0 && code < num_classes(); }
  const std::string& name_of(int code) const;

  /// Case-insensitive (ASCII) name lookup.
  std::optional<int> code_of(std::string_view name) const;

  /// The canonical schema for a task:
  ///   A: Nepali, Marathi, Sanskrit, Bhojpuri, Hindi (codes 0-4)
  ///   B: Non-hate (0), Hate (1)
  ///   C: Individual (0), Organization (1), Community (2)
  static LabelSchema for_task(TaskId task);

  /// Checks the schema against the canonical label set for its task.
  void validate() const;

  friend bool operator==(const LabelSchema&, const LabelSchema&) = default;
};

void to_json(nlohmann::json& j, const LabelSchema& schema);
void from_json(const nlohmann::json& j, LabelSchema& schema);

}  // namespace lipi
