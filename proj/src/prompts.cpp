/*!
 * Copyright (c) 2026 the lipi authors. All rights reserved.
 * Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
 */
#include "lipi/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "lipi/error.hpp"

namespace lipi {

namespace {

// A template parsed into literal chunks and named slots. The rendered output
// is literal[0] + slot[0] + literal[1] + ... + literal[n]; slot names are ""
// for task C's positional placeholders.
struct ParsedTemplate {
  std::vector<std::string> literals;
  std::vector<std::string> slots;
};

bool is_placeholder_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

ParsedTemplate parse(const std::string& body) {
  ParsedTemplate parsed;
  std::string literal;
  std::size_t i = 0;
  while (i < body.size()) {
    if (body[i] == '{') {
      std::size_t j = i + 1;
      while (j < body.size() && is_placeholder_char(body[j])) ++j;
      if (j < body.size() && body[j] == '}') {
        parsed.literals.push_back(std::move(literal));
        literal.clear();
        parsed.slots.push_back(body.substr(i + 1, j - i - 1));
        i = j + 1;
        continue;
      }
    }
    literal.push_back(body[i]);
    ++i;
  }
  parsed.literals.push_back(std::move(literal));
  return parsed;
}

std::vector<std::string> expected_slots(TaskId task) {
  switch (task) {
    case TaskId::A:
      return {"text", "label"};
    case TaskId::B:
      return {"example_text1", "example_text1_label", "example_text2",
              "example_text2_label", "example_text3", "example_text3_label",
              "example_text4", "example_text4_label", "example_text5",
              "example_text5_label", "text", "label"};
    case TaskId::C:
      return {"", ""};  // positional: text, then label
  }
  return {};
}

std::string template_filename(TaskId task) {
  switch (task) {
    case TaskId::A:
      return "task_a.txt";
    case TaskId::B:
      return "task_b.txt";
    case TaskId::C:
      return "task_c.txt";
  }
  return {};
}

}  // namespace

PromptTemplate PromptTemplate::load(TaskId task,
                                    const std::filesystem::path& dir) {
  const std::filesystem::path path = dir / template_filename(task);
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("prompt template not found: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  PromptTemplate tmpl;
  tmpl.task_id = task;
  tmpl.body = std::move(buf).str();
  if (!tmpl.body.empty() && tmpl.body.back() == '\n') {
    tmpl.body.pop_back();
  }

  const ParsedTemplate parsed = parse(tmpl.body);
  if (parsed.slots != expected_slots(task)) {
    throw InputError("prompt template " + path.string() +
                     " has unexpected placeholders for task " +
                     std::string(to_string(task)));
  }
  return tmpl;
}

std::string render(const PromptTemplate& tmpl, std::string_view text,
                   std::optional<std::string> label,
                   const std::optional<std::vector<FewShotExample>>& examples) {
  const ParsedTemplate parsed = parse(tmpl.body);
  if (parsed.slots != expected_slots(tmpl.task_id)) {
    throw InputError("prompt template has unresolved or unexpected placeholders");
  }

  if (tmpl.task_id == TaskId::B) {
    if (!examples || examples->size() != 5) {
      throw InputError("task B prompt requires exactly 5 examples, got " +
                       std::to_string(examples ? examples->size() : 0));
    }
  } else if (examples) {
    throw InputError("task " + std::string(to_string(tmpl.task_id)) +
                     " prompt has no example slots");
  }

  std::map<std::string, std::string> values;
  values["text"] = std::string(text);
  values["label"] = label.value_or("");
  if (examples) {
    for (std::size_t k = 0; k < examples->size(); ++k) {
      const std::string base = "example_text" + std::to_string(k + 1);
      values[base] = (*examples)[k].text;
      values[base + "_label"] = (*examples)[k].label;
    }
  }

  std::string out = parsed.literals.front();
  int positional = 0;
  for (std::size_t s = 0; s < parsed.slots.size(); ++s) {
    const std::string& name = parsed.slots[s];
    if (name.empty()) {
      // Task C: first {} is the text, second the response.
      out += positional == 0 ? std::string(text) : label.value_or("");
      ++positional;
    } else {
      const auto it = values.find(name);
      if (it == values.end()) {
        throw InputError("unresolved placeholder {" + name + "}");
      }
      out += it->second;
    }
    out += parsed.literals[s + 1];
  }
  return out;
}

}  // namespace lipi
