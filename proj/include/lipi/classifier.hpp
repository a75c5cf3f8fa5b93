/*!
 * Copyright (c) 2026 the lipi authors. All rights reserved.
 * Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "lipi/corpus.hpp"
#include "lipi/featurizer.hpp"
#include "lipi/losses.hpp"

namespace lipi {

enum class LrSchedule { constant, linear };

std::string_view to_string(LrSchedule s);
LrSchedule lr_schedule_from_string(std::string_view s);

struct TrainConfig {
  double learning_rate = 0.5;
  int epochs = 5;
  int batch_size = 32;
  LrSchedule lr_schedule = LrSchedule::linear;
  double weight_decay = 0.0;
  std::uint64_t seed = 0;
  LossSpec loss;
  // Resolve weighted_ce weights from the training split's class frequencies.
  bool auto_class_weights = false;

  void validate() const;
};

void to_json(nlohmann::json& j, const TrainConfig& config);
void from_json(const nlohmann::json& j, TrainConfig& config);

/// Linear softmax classifier over hashed n-gram features.
struct SoftmaxClassifier {
  Eigen::MatrixXd weights;  // num_classes x dimension
  Eigen::VectorXd bias;     // num_classes
  LabelSchema schema;
  FeaturizerConfig featurizer;

  int num_classes() const { return static_cast<int>(bias.size()); }
  void validate() const;
};

struct Prediction {
  int label = 0;                   // argmax; ties break to the lowest code
  Eigen::VectorXd probabilities;
};

struct TrainResult {
  SoftmaxClassifier model;
  // Mean loss over the full split, measured at the end of each epoch.
  std::vector<double> epoch_loss;
};

// Mini-batch gradient descent from zero-initialized parameters, with
// decoupled weight decay:
//   params <- params - lr_t * (grad + weight_decay * params)
// The linear schedule decays lr from its configured value toward 0 across
// all steps. Shuffling uses a std::mt19937_64 seeded from config.seed, so a
// fixed (split, config) pair reproduces bit-identical parameters.
TrainResult train(const DatasetSplit& split, const FeaturizerConfig& features,
                  const TrainConfig& config);

Prediction predict(const SoftmaxClassifier& model, std::string_view text);

/// Order-preserving map of predict; split schema must match the model's.
std::vector<Prediction> predict_split(const SoftmaxClassifier& model,
                                      const DatasetSplit& split);

// Model container: "LIPI" magic, format version, JSON header (schema,
// featurizer config, shapes), raw little-endian float64 parameters, FNV-1a
// checksum over everything preceding it.
void save_model(const SoftmaxClassifier& model,
                const std::filesystem::path& path);
SoftmaxClassifier load_model(const std::filesystem::path& path);

}  // namespace lipi
