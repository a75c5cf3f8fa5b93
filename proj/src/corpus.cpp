/*!
 * Copyright (c) 2026 the lipi authors. All rights reserved.
 * Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
 */
#include "lipi/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "lipi/error.hpp"

namespace lipi {

namespace {

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isspace(static_cast<unsigned char>(c));
  });
}

std::string_view trimmed(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("dataset not found: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

// One delimited record: its fields and the 1-based line it starts on.
struct DelimitedRecord {
  std::vector<std::string> fields;
  std::size_t line = 0;
};

// RFC 4180 style reader. Quoted fields may contain the delimiter, doubled
// quotes, and line breaks; CRLF and LF are both accepted.
std::vector<DelimitedRecord> parse_delimited(std::string_view content,
                                             char delimiter) {
  std::vector<DelimitedRecord> records;
  std::size_t line = 1;
  std::size_t i = 0;
  while (i < content.size()) {
    DelimitedRecord record;
    record.line = line;
    std::string field;
    bool in_quotes = false;
    bool saw_any = false;
    for (;; ++i) {
      if (i >= content.size()) {
        record.fields.push_back(std::move(field));
        break;
      }
      const char c = content[i];
      if (in_quotes) {
        if (c == '"') {
          if (i + 1 < content.size() && content[i + 1] == '"') {
            field.push_back('"');
            ++i;
          } else {
            in_quotes = false;
          }
        } else {
          if (c == '\n') ++line;
          field.push_back(c);
        }
        saw_any = true;
        continue;
      }
      if (c == '"' && field.empty()) {
        in_quotes = true;
        saw_any = true;
      } else if (c == delimiter) {
        record.fields.push_back(std::move(field));
        field.clear();
        saw_any = true;
      } else if (c == '\n' || (c == '\r' && i + 1 < content.size() &&
                               content[i + 1] == '\n')) {
        if (c == '\r') ++i;
        ++line;
        ++i;
        record.fields.push_back(std::move(field));
        break;
      } else {
        field.push_back(c);
        saw_any = true;
      }
    }
    // A line with no characters at all is not a record.
    if (saw_any || record.fields.size() > 1) {
      records.push_back(std::move(record));
    }
  }
  return records;
}

std::optional<int> parse_int(std::string_view s) {
  int value = 0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return value;
}

// Maps a raw label token to a code: schema names first (case-insensitive),
// then integer codes.
int resolve_label(std::string_view raw, const LabelSchema& schema) {
  const std::string_view token = trimmed(raw);
  if (auto code = schema.code_of(token)) return *code;
  if (auto code = parse_int(token)) {
    if (!schema.valid_code(*code)) {
      throw InputError("label code out of range (" + std::string(token) + ")");
    }
    return *code;
  }
  throw InputError("unknown label '" + std::string(token) + "'");
}

struct ColumnLayout {
  std::size_t text_col = 0;
  std::optional<std::size_t> label_col;
};

ColumnLayout locate_columns(const std::vector<std::string>& header,
                            bool has_labels) {
  ColumnLayout layout;
  bool found_text = false;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const auto name = trimmed(header[i]);
    if (iequals(name, "text") && !found_text) {
      layout.text_col = i;
      found_text = true;
    } else if (iequals(name, "label") && !layout.label_col) {
      layout.label_col = i;
    }
  }
  if (!found_text) {
    // Positional fallback: first column is text, second is label.
    layout.text_col = 0;
    layout.label_col = std::nullopt;
    if (has_labels) layout.label_col = 1;
  } else if (has_labels && !layout.label_col) {
    throw InputError("header has no 'label' column");
  }
  if (!has_labels) layout.label_col = std::nullopt;
  return layout;
}

void ingest_example(DatasetSplit& split, std::vector<RecordError>& errors,
                    std::size_t line, std::string text,
                    std::optional<int> label) {
  if (trimmed(text).empty()) {
    errors.push_back({line, "empty text record"});
    return;
  }
  split.examples.push_back({std::move(text), label});
}

void load_delimited(LoadReport& report, std::string_view content,
                    char delimiter, const LabelSchema& schema,
                    bool has_labels) {
  auto records = parse_delimited(content, delimiter);
  if (records.empty()) {
    throw InputError("missing header row");
  }
  const ColumnLayout layout = locate_columns(records.front().fields, has_labels);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    ++report.records_seen;
    if (rec.fields.size() <= layout.text_col ||
        (layout.label_col && rec.fields.size() <= *layout.label_col)) {
      report.errors.push_back({rec.line, "too few columns"});
      continue;
    }
    std::optional<int> label;
    if (layout.label_col) {
      try {
        label = resolve_label(rec.fields[*layout.label_col], schema);
      } catch (const InputError& e) {
        report.errors.push_back({rec.line, e.what()});
        continue;
      }
    }
    ingest_example(report.split, report.errors, rec.line,
                   rec.fields[layout.text_col], label);
  }
}

void load_jsonl(LoadReport& report, std::string_view content,
                const LabelSchema& schema, bool has_labels) {
  std::size_t line = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    const std::size_t eol = std::min(content.find('\n', pos), content.size());
    const std::string_view raw = content.substr(pos, eol - pos);
    pos = eol + 1;
    ++line;
    if (is_blank(raw)) {
      if (pos > content.size()) break;
      continue;
    }
    ++report.records_seen;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::exception& e) {
      report.errors.push_back({line, std::string("invalid JSON: ") + e.what()});
      continue;
    }
    if (!obj.is_object() || !obj.contains("text") ||
        !obj["text"].is_string()) {
      report.errors.push_back({line, "record has no \"text\" string field"});
      continue;
    }
    std::optional<int> label;
    if (has_labels) {
      if (!obj.contains("label") || obj["label"].is_null()) {
        report.errors.push_back({line, "record has no \"label\" field"});
        continue;
      }
      try {
        const auto& val = obj["label"];
        if (val.is_number_integer()) {
          const int code = val.get<int>();
          if (!schema.valid_code(code)) {
            throw InputError("label code out of range (" +
                             std::to_string(code) + ")");
          }
          label = code;
        } else if (val.is_string()) {
          label = resolve_label(val.get<std::string>(), schema);
        } else {
          throw InputError("label must be an integer or a string");
        }
      } catch (const InputError& e) {
        report.errors.push_back({line, e.what()});
        continue;
      }
    }
    ingest_example(report.split, report.errors, line,
                   obj["text"].get<std::string>(), label);
    if (pos > content.size()) break;
  }
}

// Quotes a CSV/TSV field only when needed.
std::string delimited_field(std::string_view value, char delimiter) {
  const bool needs_quotes =
      value.find_first_of("\"\r\n") != std::string_view::npos ||
      value.find(delimiter) != std::string_view::npos;
  if (!needs_quotes) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string_view to_string(SplitName name) {
  switch (name) {
    case SplitName::train:
      return "train";
    case SplitName::dev:
      return "dev";
    case SplitName::test:
      return "test";
  }
  return "?";
}

SplitName split_from_string(std::string_view s) {
  if (s == "train") return SplitName::train;
  if (s == "dev") return SplitName::dev;
  if (s == "test") return SplitName::test;
  throw InputError("unknown split '" + std::string(s) +
                   "' (expected train, dev, or test)");
}

std::string_view to_string(FileFormat format) {
  switch (format) {
    case FileFormat::csv:
      return "csv";
    case FileFormat::tsv:
      return "tsv";
    case FileFormat::jsonl:
      return "jsonl";
  }
  return "?";
}

FileFormat format_from_string(std::string_view s) {
  if (s == "csv") return FileFormat::csv;
  if (s == "tsv") return FileFormat::tsv;
  if (s == "jsonl") return FileFormat::jsonl;
  throw InputError("unknown format '" + std::string(s) +
                   "' (expected csv, tsv, or jsonl)");
}

bool DatasetSplit::fully_labeled() const {
  return std::all_of(examples.begin(), examples.end(),
                     [](const LabeledExample& e) { return e.label.has_value(); });
}

LoadReport load_dataset_lenient(const std::filesystem::path& path,
                                FileFormat format, const LabelSchema& schema,
                                bool has_labels, SplitName name) {
  schema.validate();
  LoadReport report;
  report.split.name = name;
  report.split.schema = schema;
  const std::string content = read_file(path);
  switch (format) {
    case FileFormat::csv:
      load_delimited(report, content, ',', schema, has_labels);
      break;
    case FileFormat::tsv:
      load_delimited(report, content, '\t', schema, has_labels);
      break;
    case FileFormat::jsonl:
      load_jsonl(report, content, schema, has_labels);
      break;
  }
  return report;
}

DatasetSplit load_dataset(const std::filesystem::path& path, FileFormat format,
                          const LabelSchema& schema, bool has_labels,
                          SplitName name) {
  LoadReport report =
      load_dataset_lenient(path, format, schema, has_labels, name);
  if (!report.errors.empty()) {
    const auto& first = report.errors.front();
    std::string msg = path.string() + ":" + std::to_string(first.line) + ": " +
                      first.message;
    if (report.errors.size() > 1) {
      msg += " (and " + std::to_string(report.errors.size() - 1) +
             " more bad records)";
    }
    throw InputError(msg);
  }
  return std::move(report.split);
}

void save_dataset(const DatasetSplit& split, const std::filesystem::path& path,
                  FileFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw InputError("cannot write dataset: " + path.string());
  }
  const bool labeled = split.fully_labeled() && !split.examples.empty();
  if (format == FileFormat::jsonl) {
    for (const auto& ex : split.examples) {
      nlohmann::json obj{{"text", ex.text}};
      if (ex.label) obj["label"] = *ex.label;
      out << obj.dump() << '\n';
    }
  } else {
    const char delim = format == FileFormat::csv ? ',' : '\t';
    out << "text";
    if (labeled) out << delim << "label";
    out << '\n';
    for (const auto& ex : split.examples) {
      out << delimited_field(ex.text, delim);
      if (labeled) out << delim << *ex.label;
      out << '\n';
    }
  }
  if (!out) {
    throw InputError("write failed: " + path.string());
  }
}

bool file_has_label_field(const std::filesystem::path& path,
                          FileFormat format) {
  const std::string content = read_file(path);
  if (format == FileFormat::jsonl) {
    std::size_t pos = 0;
    while (pos < content.size()) {
      const std::size_t eol = std::min(content.find('\n', pos), content.size());
      const std::string_view raw =
          std::string_view(content).substr(pos, eol - pos);
      pos = eol + 1;
      if (is_blank(raw)) continue;
      try {
        const auto obj = nlohmann::json::parse(raw);
        return obj.is_object() && obj.contains("label") &&
               !obj["label"].is_null();
      } catch (const nlohmann::json::exception&) {
        return false;
      }
    }
    return false;
  }
  const char delim = format == FileFormat::csv ? ',' : '\t';
  const auto records = parse_delimited(content, delim);
  if (records.empty()) return false;
  const auto& header = records.front().fields;
  const bool named = std::any_of(header.begin(), header.end(),
                                 [](const std::string& h) {
                                   return iequals(trimmed(h), "label");
                                 });
  const bool has_text_col = std::any_of(header.begin(), header.end(),
                                        [](const std::string& h) {
                                          return iequals(trimmed(h), "text");
                                        });
  // Positional layout: a second column holds labels.
  return named || (!has_text_col && header.size() >= 2);
}

ClassDistribution class_distribution(const DatasetSplit& split) {
  ClassDistribution dist;
  dist.counts.assign(static_cast<std::size_t>(split.schema.num_classes()), 0);
  for (std::size_t i = 0; i < split.examples.size(); ++i) {
    const auto& ex = split.examples[i];
    if (!ex.label) {
      throw InputError("unlabeled example at index " + std::to_string(i));
    }
    if (!split.schema.valid_code(*ex.label)) {
      throw InputError("label code out of range (" + std::to_string(*ex.label) +
                       ") at index " + std::to_string(i));
    }
    ++dist.counts[static_cast<std::size_t>(*ex.label)];
  }
  dist.total = static_cast<std::int64_t>(split.examples.size());
  return dist;
}

DatasetSplit merge_splits(const DatasetSplit& a, const DatasetSplit& b) {
  if (a.schema != b.schema) {
    throw InputError("schema mismatch: cannot merge splits of different tasks");
  }
  if (!a.fully_labeled() || !b.fully_labeled()) {
    throw InputError("cannot merge splits with unlabeled examples");
  }
  DatasetSplit merged;
  merged.name = a.name;
  merged.schema = a.schema;
  merged.examples.reserve(a.examples.size() + b.examples.size());
  merged.examples.insert(merged.examples.end(), a.examples.begin(),
                         a.examples.end());
  merged.examples.insert(merged.examples.end(), b.examples.begin(),
                         b.examples.end());
  return merged;
}

std::vector<double> class_weights(const ClassDistribution& dist) {
  const auto num_classes = dist.counts.size();
  if (num_classes == 0) {
    throw InputError("empty class distribution");
  }
  std::vector<double> weights(num_classes, 0.0);
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (dist.counts[c] <= 0) {
      throw InputError("class " + std::to_string(c) +
                       " has zero count; class weights undefined");
    }
    weights[c] = static_cast<double>(dist.total) /
                 (static_cast<double>(num_classes) *
                  static_cast<double>(dist.counts[c]));
  }
  return weights;
}

ClassDistribution reference_distribution(TaskId task, SplitName split) {
  // Published class counts per task and split.
  static constexpr std::int64_t kTaskA[3][5] = {
      {12544, 11034, 10996, 10184, 7664},  // train
      {2688, 2364, 2356, 2182, 1643},      // dev
      {2688, 2365, 2356, 2183, 1642},      // test
  };
  static constexpr std::int64_t kTaskB[3][2] = {
      {16805, 2214},
      {3602, 474},
      {3601, 475},
  };
  static constexpr std::int64_t kTaskC[3][3] = {
      {1074, 856, 284},
      {230, 183, 61},
      {230, 184, 61},
  };
  const auto row = static_cast<std::size_t>(split);
  ClassDistribution dist;
  switch (task) {
    case TaskId::A:
      dist.counts.assign(std::begin(kTaskA[row]), std::end(kTaskA[row]));
      break;
    case TaskId::B:
      dist.counts.assign(std::begin(kTaskB[row]), std::end(kTaskB[row]));
      break;
    case TaskId::C:
      dist.counts.assign(std::begin(kTaskC[row]), std::end(kTaskC[row]));
      break;
  }
  dist.total = 0;
  for (auto c : dist.counts) dist.total += c;
  return dist;
}

}  // namespace lipi
