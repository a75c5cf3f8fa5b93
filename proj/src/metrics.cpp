/*!
 * Copyright (c) 2026 the lipi authors. All rights reserved.
 * Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
 */
#include "lipi/metrics.hpp"

#include <algorithm>
#include <cstdio>

#include "lipi/error.hpp"

namespace lipi {

ConfusionMatrix confusion(std::span<const int> gold, std::span<const int> pred,
                          const LabelSchema& schema) {
  if (gold.size() != pred.size()) {
    throw InputError("confusion: " + std::to_string(gold.size()) +
                     " gold labels vs " + std::to_string(pred.size()) +
                     " predictions");
  }
  if (gold.empty()) {
    throw InputError("confusion requires at least one scored example");
  }
  ConfusionMatrix cm;
  cm.schema = schema;
  const auto side = static_cast<Eigen::Index>(schema.num_classes());
  cm.counts.setZero(side, side);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (!schema.valid_code(gold[i]) || !schema.valid_code(pred[i])) {
      throw InputError("confusion: invalid label code at index " +
                       std::to_string(i));
    }
    ++cm.counts(gold[i], pred[i]);
  }
  return cm;
}

MetricsReport report(const ConfusionMatrix& cm) {
  if (cm.counts.size() == 0 || cm.total() == 0) {
    throw InputError("cannot report metrics on an empty confusion matrix");
  }
  const Eigen::Index side = cm.counts.rows();
  MetricsReport out;
  out.per_class.resize(static_cast<std::size_t>(side));
  out.support.resize(static_cast<std::size_t>(side));
  for (Eigen::Index c = 0; c < side; ++c) {
    const auto tp = static_cast<double>(cm.counts(c, c));
    const auto colsum = static_cast<double>(cm.counts.col(c).sum());
    const auto rowsum = static_cast<double>(cm.counts.row(c).sum());
    ClassMetrics& m = out.per_class[static_cast<std::size_t>(c)];
    m.precision = colsum > 0.0 ? tp / colsum : 0.0;
    m.recall = rowsum > 0.0 ? tp / rowsum : 0.0;
    m.f1 = (m.precision + m.recall) > 0.0
               ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
               : 0.0;
    out.support[static_cast<std::size_t>(c)] = cm.counts.row(c).sum();
    out.macro_precision += m.precision;
    out.macro_recall += m.recall;
    out.macro_f1 += m.f1;
  }
  const auto classes = static_cast<double>(side);
  out.macro_precision /= classes;
  out.macro_recall /= classes;
  out.macro_f1 /= classes;
  out.micro_f1 = static_cast<double>(cm.counts.trace()) /
                 static_cast<double>(cm.total());
  return out;
}

namespace {

Evaluation score_predictions(const std::vector<int>& pred,
                             const DatasetSplit& split) {
  if (!split.fully_labeled()) {
    throw InputError("evaluation requires a fully labeled split");
  }
  std::vector<int> gold;
  gold.reserve(split.examples.size());
  for (const auto& ex : split.examples) gold.push_back(*ex.label);
  Evaluation eval;
  eval.confusion = confusion(gold, pred, split.schema);
  eval.report = report(eval.confusion);
  return eval;
}

}  // namespace

Evaluation evaluate(const SoftmaxClassifier& model, const DatasetSplit& split) {
  const auto predictions = predict_split(model, split);
  std::vector<int> pred;
  pred.reserve(predictions.size());
  for (const auto& p : predictions) pred.push_back(p.label);
  return score_predictions(pred, split);
}

Evaluation evaluate(const EnsembleSpec& ensemble, const DatasetSplit& split) {
  const auto outcomes = ensemble_predict_split(ensemble, split);
  std::vector<int> pred;
  pred.reserve(outcomes.size());
  for (const auto& o : outcomes) pred.push_back(o.label);
  return score_predictions(pred, split);
}

std::vector<std::string> rank_models(
    std::vector<std::pair<std::string, MetricsReport>> reports, RankKey key) {
  if (reports.empty()) {
    throw InputError("rank_models requires at least one report");
  }
  const auto score = [key](const MetricsReport& r) {
    return key == RankKey::macro_f1 ? r.macro_f1 : r.micro_f1;
  };
  std::sort(reports.begin(), reports.end(),
            [&](const auto& a, const auto& b) {
              if (score(a.second) != score(b.second)) {
                return score(a.second) > score(b.second);
              }
              return a.first < b.first;
            });
  std::vector<std::string> names;
  names.reserve(reports.size());
  for (auto& [name, r] : reports) names.push_back(std::move(name));
  return names;
}

std::string to_table(const MetricsReport& report, const LabelSchema& schema) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-14s %9s %9s %9s %9s\n", "label",
                "precision", "recall", "f1", "support");
  out += line;
  for (std::size_t c = 0; c < report.per_class.size(); ++c) {
    const auto& m = report.per_class[c];
    std::snprintf(line, sizeof(line), "%-14s %9.4f %9.4f %9.4f %9lld\n",
                  schema.name_of(static_cast<int>(c)).c_str(), m.precision,
                  m.recall, m.f1,
                  static_cast<long long>(report.support[c]));
    out += line;
  }
  std::snprintf(line, sizeof(line), "%-14s %9.4f %9.4f %9.4f\n", "macro",
                report.macro_precision, report.macro_recall, report.macro_f1);
  out += line;
  std::snprintf(line, sizeof(line), "%-14s %9.4f\n", "micro_f1",
                report.micro_f1);
  out += line;
  return out;
}

std::string to_csv(const ConfusionMatrix& cm) {
  std::string out = "gold\\pred";
  for (const auto& name : cm.schema.labels) {
    out += ',';
    out += name;
  }
  out += '\n';
  for (Eigen::Index g = 0; g < cm.counts.rows(); ++g) {
    out += cm.schema.name_of(static_cast<int>(g));
    for (Eigen::Index p = 0; p < cm.counts.cols(); ++p) {
      out += ',';
      out += std::to_string(cm.counts(g, p));
    }
    out += '\n';
  }
  return out;
}

void to_json(nlohmann::json& j, const MetricsReport& report) {
  nlohmann::json per_class = nlohmann::json::array();
  for (const auto& m : report.per_class) {
    per_class.push_back({{"precision", m.precision},
                         {"recall", m.recall},
                         {"f1", m.f1}});
  }
  j = nlohmann::json{{"per_class", std::move(per_class)},
                     {"macro_precision", report.macro_precision},
                     {"macro_recall", report.macro_recall},
                     {"macro_f1", report.macro_f1},
                     {"micro_f1", report.micro_f1},
                     {"support", report.support}};
}

void from_json(const nlohmann::json& j, MetricsReport& report) {
  report = MetricsReport{};
  for (const auto& m : j.at("per_class")) {
    report.per_class.push_back({m.at("precision").get<double>(),
                                m.at("recall").get<double>(),
                                m.at("f1").get<double>()});
  }
  report.macro_precision = j.at("macro_precision").get<double>();
  report.macro_recall = j.at("macro_recall").get<double>();
  report.macro_f1 = j.at("macro_f1").get<double>();
  report.micro_f1 = j.at("micro_f1").get<double>();
  report.support = j.at("support").get<std::vector<std::int64_t>>();
}

}  // namespace lipi
