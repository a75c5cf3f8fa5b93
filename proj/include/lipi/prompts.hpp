/*!
 * Copyright (c) 2026 the lipi authors. All rights reserved.
 * Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
 */
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lipi/schema.hpp"

namespace lipi {

/// A few-shot demonstration for the task B template.
struct FewShotExample {
  std::string text;
  std::string label;
};

// Instruction templates for driving generative models, checked in under
// data/prompts/ and loaded verbatim. Placeholders:
//   task A: {text}, {label}
//   task B: {example_text1..5}, {example_text1..5_label}, {text}, {label}
//   task C: two bare {} slots, positionally text then label
struct PromptTemplate {
  TaskId task_id = TaskId::A;
  std::string body;

  /// Reads `dir/task_<x>.txt`, strips one trailing newline, and checks the
  /// placeholder set matches the task.
  static PromptTemplate load(TaskId task, const std::filesystem::path& dir);
};

// Fills the template's slots. An absent label leaves the response slot empty
// (inference mode). Task B requires exactly five examples; tasks A and C
// reject examples. The input text lands at the {text} site byte-for-byte.
std::string render(const PromptTemplate& tmpl, std::string_view text,
                   std::optional<std::string> label = std::nullopt,
                   const std::optional<std::vector<FewShotExample>>& examples =
                       std::nullopt);

}  // namespace lipi
