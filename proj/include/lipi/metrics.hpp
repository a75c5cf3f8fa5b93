/*!
 * Copyright (c) 2026 the lipi authors. All rights reserved.
 * Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
 */
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"
#include "lipi/classifier.hpp"
#include "lipi/ensemble.hpp"

namespace lipi {

struct ConfusionMatrix {
  LabelSchema schema;
  // counts(g, p): examples with gold label g predicted as p.
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts;

  std::int64_t total() const { return counts.sum(); }
};

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

struct MetricsReport {
  std::vector<ClassMetrics> per_class;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;  // equals accuracy for single-label classification
  std::vector<std::int64_t> support;  // gold count per class
};

ConfusionMatrix confusion(std::span<const int> gold, std::span<const int> pred,
                          const LabelSchema& schema);

// Per-class precision = diag/colsum, recall = diag/rowsum, f1 = harmonic
// mean; a zero denominator yields 0 for that metric. Macro values are
// unweighted means over classes; micro_f1 = trace/total.
MetricsReport report(const ConfusionMatrix& cm);

struct Evaluation {
  ConfusionMatrix confusion;
  MetricsReport report;
};

Evaluation evaluate(const SoftmaxClassifier& model, const DatasetSplit& split);
Evaluation evaluate(const EnsembleSpec& ensemble, const DatasetSplit& split);

enum class RankKey { macro_f1, micro_f1 };

/// Names in descending key order; equal scores break lexicographically.
std::vector<std::string> rank_models(
    std::vector<std::pair<std::string, MetricsReport>> reports, RankKey key);

/// Human-readable table (per-class rows plus macro/micro summary).
std::string to_table(const MetricsReport& report, const LabelSchema& schema);

/// CSV with a header row and a leading label-name column.
std::string to_csv(const ConfusionMatrix& cm);

void to_json(nlohmann::json& j, const MetricsReport& report);
void from_json(const nlohmann::json& j, MetricsReport& report);

}  // namespace lipi
