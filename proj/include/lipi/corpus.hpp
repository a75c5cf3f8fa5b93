/*!
 * Copyright (c) 2026 the lipi authors. All rights reserved.
 * Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lipi/schema.hpp"

namespace lipi {

/// One text with an optional gold label code under a LabelSchema.
struct LabeledExample {
  std::string text;
  std::optional<int> label;

  friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
};

enum class SplitName { train, dev, test };

std::string_view to_string(SplitName name);
SplitName split_from_string(std::string_view s);

struct DatasetSplit {
  SplitName name = SplitName::train;
  LabelSchema schema;
  std::vector<LabeledExample> examples;

  std::size_t size() const { return examples.size(); }
  bool fully_labeled() const;
};

enum class FileFormat { csv, tsv, jsonl };

std::string_view to_string(FileFormat format);
FileFormat format_from_string(std::string_view s);

/// A record that could not be ingested; `line` is 1-based in the source file.
struct RecordError {
  std::size_t line = 0;
  std::string message;
};

/// Lenient load result. Every input record lands either in `split.examples`
/// or in `errors`; nothing is dropped silently.
struct LoadReport {
  DatasetSplit split;
  std::vector<RecordError> errors;
  std::size_t records_seen = 0;
};

// CSV/TSV files carry a header row; columns are located by name
// ("text"/"label", case-insensitive) or positionally (first/second).
// JSONL records are objects with "text" and, optionally, "label".
// Label values may be schema names (case-insensitive) or integer codes.
LoadReport load_dataset_lenient(const std::filesystem::path& path,
                                FileFormat format, const LabelSchema& schema,
                                bool has_labels,
                                SplitName name = SplitName::train);

/// Strict variant: throws InputError on the first bad record (message carries
/// the line number).
DatasetSplit load_dataset(const std::filesystem::path& path, FileFormat format,
                          const LabelSchema& schema, bool has_labels,
                          SplitName name = SplitName::train);

/// Writes a split back out (UTF-8, LF). Labels are written as integer codes,
/// so load(save(s)) reproduces texts and codes exactly.
void save_dataset(const DatasetSplit& split, const std::filesystem::path& path,
                  FileFormat format);

/// True when the file's header (CSV/TSV) or first record (JSONL) exposes a
/// label field.
bool file_has_label_field(const std::filesystem::path& path, FileFormat format);

struct ClassDistribution {
  std::vector<std::int64_t> counts;  // index == label code
  std::int64_t total = 0;
};

/// Per-label counts over a fully labeled split; absent labels count 0.
ClassDistribution class_distribution(const DatasetSplit& split);

/// Concatenates two labeled splits (a then b); schemas must match.
/// The result keeps `a`'s split name.
DatasetSplit merge_splits(const DatasetSplit& a, const DatasetSplit& b);

// Inverse-frequency class weights, weight_c = total / (num_classes * count_c),
// so the frequency-weighted mean of the weights is exactly 1. Every class
// must have a nonzero count.
std::vector<double> class_weights(const ClassDistribution& dist);

/// Published per-split class counts of the shared-task datasets, kept as
/// ingestion-audit fixtures.
ClassDistribution reference_distribution(TaskId task, SplitName split);

}  // namespace lipi
