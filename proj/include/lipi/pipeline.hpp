/*!
 * Copyright (c) 2026 the lipi authors. All rights reserved.
 * Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lipi/classifier.hpp"
#include "lipi/ensemble.hpp"
#include "lipi/metrics.hpp"

namespace lipi {

struct ModelSpec {
  std::string name;
  TrainConfig train;
};

struct EnsembleConfig {
  std::vector<std::string> members;  // model names, in voting order
  std::string fallback;              // one of the member names
};

struct GridSearchConfig {
  std::vector<double> alphas{0.25, 0.35, 0.5, 0.75, 1.0};
  std::vector<double> gammas{0.0, 1.0, 2.0, 4.0};
  std::string base_model;  // whose TrainConfig the grid cells reuse
};

/// Optional overrides applied on top of the config file; the environment
/// variables LIPI_OUTPUT_DIR and LIPI_SEED sit between file and CLI flags.
struct ConfigOverrides {
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::uint64_t> seed;
  std::optional<TaskId> task;
};

struct PipelineConfig {
  TaskId task = TaskId::A;
  FileFormat format = FileFormat::csv;
  std::filesystem::path train_path;
  std::filesystem::path dev_path;
  std::filesystem::path test_path;
  FeaturizerConfig featurizer;
  std::vector<ModelSpec> models;
  std::optional<EnsembleConfig> ensemble;
  GridSearchConfig grid;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 0;
  std::filesystem::path prompts_dir = "data/prompts";

  /// Parses a JSON config file; relative data paths resolve against the
  /// config file's directory. Models without an explicit seed inherit the
  /// pipeline seed.
  static PipelineConfig load(const std::filesystem::path& path,
                             const ConfigOverrides& overrides = {});
  static PipelineConfig from_json(const nlohmann::json& j,
                                  const std::filesystem::path& base_dir,
                                  const ConfigOverrides& overrides = {});

  void validate() const;
  const ModelSpec& model(std::string_view name) const;
  LabelSchema schema() const { return LabelSchema::for_task(task); }

  std::filesystem::path models_dir() const { return output_dir / "models"; }
  std::filesystem::path reports_dir() const { return output_dir / "reports"; }
  std::filesystem::path predictions_dir() const {
    return output_dir / "predictions";
  }
  std::filesystem::path model_path(std::string_view name,
                                   bool final = false) const;
};

/// Orchestrates the two-phase workflow: train candidates on train, rank them
/// on dev, retrain the selected ones on train+dev, then predict the test set.
/// Every dataset read goes through an audited loader, so the selection and
/// finalize phases can be proven never to touch the test split.
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config);

  struct TrainSummary {
    std::string name;
    std::filesystem::path model_path;
    MetricsReport dev_report;
  };
  /// Trains one named model on the train split and scores it on dev; writes
  /// the model artifact and the dev report into the output directory.
  TrainSummary run_train(const std::string& model_name);

  /// Ranks all configured models by their persisted dev macro-F1, keeps the
  /// top k, and writes the selection manifest. Reads no datasets.
  std::vector<std::string> run_select(int top_k);

  struct FinalizeSummary {
    std::vector<std::string> names;
    std::vector<std::filesystem::path> model_paths;
    std::size_t examples_trained_on = 0;
  };
  /// Retrains every selected model from scratch on train+dev.
  FinalizeSummary run_finalize();

  struct PredictSummary {
    std::filesystem::path predictions_path;
    std::size_t examples = 0;
    std::optional<MetricsReport> test_report;  // present when test is labeled
  };
  /// Predicts the test split with the configured ensemble, or with a single
  /// model when `model_name` is given. Emits one CSV row per example and,
  /// when the test file carries labels, a metrics report.
  PredictSummary run_predict(
      const std::optional<std::string>& model_name = std::nullopt);

  struct GridCell {
    double alpha = 0.0;
    double gamma = 0.0;
    double dev_macro_f1 = 0.0;
  };
  struct GridSummary {
    GridCell best;
    std::vector<GridCell> cells;
  };
  // Trains one focal-loss model per (alpha, gamma) cell on train, scores it
  // on dev, and returns the best cell; ties break to the smaller gamma, then
  // the smaller alpha. The full table is persisted.
  GridSummary run_grid_search();

  /// Renders one prompt per example of `split` as JSONL. `with_labels` fills
  /// the response slots; otherwise they stay empty (inference mode). Task B
  /// sources its five demonstrations from the head of the train split.
  std::size_t run_render_prompts(SplitName split, bool with_labels,
                                 std::ostream& out);

  /// Evaluates a stored model on a labeled split and writes report files.
  Evaluation run_report(const std::string& model_name, SplitName split,
                        std::ostream& human_out);

  /// Dataset reads so far, in load order (the access audit).
  const std::vector<SplitName>& splits_read() const { return splits_read_; }
  const PipelineConfig& config() const { return config_; }

 private:
  enum class Phase { train, select, finalize, predict, grid_search, other };

  DatasetSplit load_split(SplitName name, Phase phase, bool has_labels);
  std::filesystem::path split_path(SplitName name) const;
  SoftmaxClassifier load_named_model(const std::string& name) const;
  void write_report_files(const std::string& stem, const Evaluation& eval,
                          const nlohmann::json& extra);
  void ensure_output_dirs() const;

  PipelineConfig config_;
  std::vector<SplitName> splits_read_;
};

}  // namespace lipi
