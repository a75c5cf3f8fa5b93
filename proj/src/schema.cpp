/*!
 * Copyright (c) 2026 the lipi authors. All rights reserved.
 * Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
 */
#include "lipi/schema.hpp"

#include <algorithm>
#include <cctype>

#include "lipi/error.hpp"

namespace lipi {

namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

}  // namespace

std::string_view to_string(TaskId task) {
  switch (task) {
    case TaskId::A:
      return "A";
    case TaskId::B:
      return "B";
    case TaskId::C:
      return "C";
  }
  return "?";
}

TaskId task_from_string(std::string_view s) {
  if (s == "A" || s == "a") return TaskId::A;
  if (s == "B" || s == "b") return TaskId::B;
  if (s == "C" || s == "c") return TaskId::C;
  throw InputError("unknown task '" + std::string(s) + "' (expected A, B, or C)");
}

const std::string& LabelSchema::name_of(int code) const {
  if (!valid_code(code)) {
    throw InputError("label code out of range (" + std::to_string(code) +
                     ") for task " + std::string(to_string(task_id)));
  }
  return labels[static_cast<std::size_t>(code)];
}

std::optional<int> LabelSchema::code_of(std::string_view name) const {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (iequals(labels[i], name)) return static_cast<int>(i);
  }
  return std::nullopt;
}

LabelSchema LabelSchema::for_task(TaskId task) {
  LabelSchema schema;
  schema.task_id = task;
  switch (task) {
    case TaskId::A:
      schema.labels = {"Nepali", "Marathi", "Sanskrit", "Bhojpuri", "Hindi"};
      break;
    case TaskId::B:
      schema.labels = {"Non-hate", "Hate"};
      break;
    case TaskId::C:
      schema.labels = {"Individual", "Organization", "Community"};
      break;
  }
  return schema;
}

void LabelSchema::validate() const {
  const LabelSchema canonical = for_task(task_id);
  if (labels.size() != canonical.labels.size()) {
    throw InputError("task " + std::string(to_string(task_id)) + " requires " +
                     std::to_string(canonical.labels.size()) + " labels, got " +
                     std::to_string(labels.size()));
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!iequals(labels[i], canonical.labels[i])) {
      throw InputError("task " + std::string(to_string(task_id)) + " label " +
                       std::to_string(i) + " must be '" + canonical.labels[i] +
                       "', got '" + labels[i] + "'");
    }
  }
}

void to_json(nlohmann::json& j, const LabelSchema& schema) {
  j = nlohmann::json{{"task", std::string(to_string(schema.task_id))},
                     {"labels", schema.labels}};
}

void from_json(const nlohmann::json& j, LabelSchema& schema) {
  schema.task_id = task_from_string(j.at("task").get<std::string>());
  schema.labels = j.at("labels").get<std::vector<std::string>>();
  schema.validate();
}

}  // namespace lipi
