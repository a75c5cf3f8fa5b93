/*!
 * Copyright (c) 2026 the lipi authors. All rights reserved.
 * Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
 */
#include "lipi/classifier.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "lipi/error.hpp"

static_assert(std::endian::native == std::endian::little,
              "model files store parameters little-endian");

namespace lipi {

namespace {

constexpr char kModelMagic[4] = {'L', 'I', 'P', 'I'};
constexpr std::uint32_t kModelFormatVersion = 1;

Eigen::VectorXd logits_for(const SoftmaxClassifier& model,
                           const FeatureVector& features) {
  Eigen::VectorXd z = model.bias;
  for (const auto& [index, value] : features.entries) {
    z += value * model.weights.col(index);
  }
  return z;
}

double schedule_lr(const TrainConfig& config, std::int64_t step,
                   std::int64_t total_steps) {
  if (config.lr_schedule == LrSchedule::constant) return config.learning_rate;
  return config.learning_rate *
         static_cast<double>(total_steps - step) /
         static_cast<double>(total_steps);
}

double full_split_loss(const LossSpec& spec, const SoftmaxClassifier& model,
                       const std::vector<FeatureVector>& features,
                       const std::vector<int>& targets) {
  Eigen::MatrixXd logits(static_cast<Eigen::Index>(features.size()),
                         model.num_classes());
  for (std::size_t i = 0; i < features.size(); ++i) {
    logits.row(static_cast<Eigen::Index>(i)) =
        logits_for(model, features[i]).transpose();
  }
  return batch_loss(spec, logits, targets).value;
}

void append_bytes(std::string& out, const void* data, std::size_t size) {
  out.append(static_cast<const char*>(data), size);
}

template <typename T>
void append_pod(std::string& out, const T& value) {
  append_bytes(out, &value, sizeof(T));
}

template <typename T>
T read_pod(const std::string& buf, std::size_t& offset) {
  if (offset + sizeof(T) > buf.size()) {
    throw InputError("corrupt model file: truncated");
  }
  T value;
  std::memcpy(&value, buf.data() + offset, sizeof(T));
  offset += sizeof(T);
  return value;
}

}  // namespace

std::string_view to_string(LrSchedule s) {
  return s == LrSchedule::linear ? "linear" : "constant";
}

LrSchedule lr_schedule_from_string(std::string_view s) {
  if (s == "linear") return LrSchedule::linear;
  if (s == "constant") return LrSchedule::constant;
  throw InputError("unknown lr schedule '" + std::string(s) +
                   "' (expected constant or linear)");
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw InputError("learning_rate must be > 0");
  if (epochs <= 0) throw InputError("epochs must be > 0");
  if (batch_size <= 0) throw InputError("batch_size must be > 0");
  if (weight_decay < 0.0) throw InputError("weight_decay must be >= 0");
  if (auto_class_weights && loss.kind != LossKind::weighted_cross_entropy) {
    throw InputError("auto class weights require the weighted_ce loss");
  }
}

void to_json(nlohmann::json& j, const TrainConfig& config) {
  j = nlohmann::json{
      {"learning_rate", config.learning_rate},
      {"epochs", config.epochs},
      {"batch_size", config.batch_size},
      {"lr_schedule", std::string(to_string(config.lr_schedule))},
      {"weight_decay", config.weight_decay},
      {"seed", config.seed},
  };
  if (config.auto_class_weights) {
    j["loss"] = nlohmann::json{{"kind", "weighted_ce"}, {"weights", "auto"}};
  } else {
    j["loss"] = config.loss;
  }
}

void from_json(const nlohmann::json& j, TrainConfig& config) {
  config = TrainConfig{};
  if (j.contains("learning_rate"))
    config.learning_rate = j.at("learning_rate").get<double>();
  if (j.contains("epochs")) config.epochs = j.at("epochs").get<int>();
  if (j.contains("batch_size"))
    config.batch_size = j.at("batch_size").get<int>();
  if (j.contains("lr_schedule"))
    config.lr_schedule =
        lr_schedule_from_string(j.at("lr_schedule").get<std::string>());
  if (j.contains("weight_decay"))
    config.weight_decay = j.at("weight_decay").get<double>();
  if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("loss")) {
    const auto& loss_obj = j.at("loss");
    config.loss = loss_obj.get<LossSpec>();
    config.auto_class_weights =
        loss_obj.contains("weights") && loss_obj["weights"].is_string() &&
        loss_obj["weights"].get<std::string>() == "auto";
    if (config.auto_class_weights &&
        config.loss.kind != LossKind::weighted_cross_entropy) {
      throw InputError("\"weights\": \"auto\" requires kind weighted_ce");
    }
  }
  config.validate();
}

void SoftmaxClassifier::validate() const {
  schema.validate();
  featurizer.validate();
  const auto classes = static_cast<Eigen::Index>(schema.num_classes());
  if (bias.size() != classes || weights.rows() != classes ||
      weights.cols() != static_cast<Eigen::Index>(featurizer.dimension)) {
    throw InputError("model parameter shapes do not match schema/featurizer");
  }
  if (!weights.allFinite() || !bias.allFinite()) {
    throw InputError("model parameters contain non-finite values");
  }
}

TrainResult train(const DatasetSplit& split, const FeaturizerConfig& features,
                  const TrainConfig& config) {
  config.validate();
  features.validate();
  if (split.examples.empty()) {
    throw InputError("cannot train on an empty split");
  }
  if (!split.fully_labeled()) {
    throw InputError("cannot train on a split with unlabeled examples");
  }

  LossSpec spec = config.loss;
  if (config.auto_class_weights) {
    const auto weights = class_weights(class_distribution(split));
    spec.class_weights = Eigen::Map<const Eigen::VectorXd>(
        weights.data(), static_cast<Eigen::Index>(weights.size()));
  }
  const auto num_classes = static_cast<Eigen::Index>(split.schema.num_classes());
  spec.validate(num_classes);

  const std::vector<FeatureVector> vectors = featurize_split(split, features);
  std::vector<int> targets(split.examples.size());
  for (std::size_t i = 0; i < targets.size(); ++i) {
    targets[i] = *split.examples[i].label;
  }

  TrainResult result;
  SoftmaxClassifier& model = result.model;
  model.schema = split.schema;
  model.featurizer = features;
  model.weights = Eigen::MatrixXd::Zero(
      num_classes, static_cast<Eigen::Index>(features.dimension));
  model.bias = Eigen::VectorXd::Zero(num_classes);

  const auto n = static_cast<std::int64_t>(split.examples.size());
  const std::int64_t batches_per_epoch =
      (n + config.batch_size - 1) / config.batch_size;
  const std::int64_t total_steps = batches_per_epoch * config.epochs;

  std::mt19937_64 rng(config.seed);
  std::vector<std::size_t> order(split.examples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  std::int64_t step = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::int64_t start = 0; start < n; start += config.batch_size) {
      const auto batch =
          static_cast<Eigen::Index>(std::min<std::int64_t>(config.batch_size, n - start));
      Eigen::MatrixXd logits(batch, num_classes);
      std::vector<int> batch_targets(static_cast<std::size_t>(batch));
      for (Eigen::Index i = 0; i < batch; ++i) {
        const std::size_t idx = order[static_cast<std::size_t>(start + i)];
        logits.row(i) = logits_for(model, vectors[idx]).transpose();
        batch_targets[static_cast<std::size_t>(i)] = targets[idx];
      }

      const BatchLoss bl = batch_loss(spec, logits, batch_targets);
      if (!std::isfinite(bl.value)) {
        throw Error("training diverged: non-finite loss " +
                    std::to_string(bl.value) + " at epoch " +
                    std::to_string(epoch) + ", step " + std::to_string(step));
      }

      const double lr = schedule_lr(config, step, total_steps);
      if (config.weight_decay != 0.0) {
        const double decay = 1.0 - lr * config.weight_decay;
        model.weights *= decay;
        model.bias *= decay;
      }
      // grad_rows already carry the 1/batch factor from the mean reduction;
      // the weight gradient is the sparse outer product grad_row * x^T.
      for (Eigen::Index i = 0; i < batch; ++i) {
        const std::size_t idx = order[static_cast<std::size_t>(start + i)];
        const Eigen::VectorXd g = bl.grad_rows.row(i).transpose();
        model.bias -= lr * g;
        for (const auto& [col, value] : vectors[idx].entries) {
          model.weights.col(col) -= (lr * value) * g;
        }
      }
      ++step;
    }
    result.epoch_loss.push_back(full_split_loss(spec, model, vectors, targets));
  }
  return result;
}

Prediction predict(const SoftmaxClassifier& model, std::string_view text) {
  Prediction prediction;
  const FeatureVector features = featurize(text, model.featurizer);
  const Eigen::VectorXd z = logits_for(model, features);
  prediction.probabilities = softmax(z);
  Eigen::Index argmax = 0;
  prediction.probabilities.maxCoeff(&argmax);  // first maximum: lowest code
  prediction.label = static_cast<int>(argmax);
  return prediction;
}

std::vector<Prediction> predict_split(const SoftmaxClassifier& model,
                                      const DatasetSplit& split) {
  if (split.schema != model.schema) {
    throw InputError("schema mismatch: model is for task " +
                     std::string(to_string(model.schema.task_id)) +
                     ", split is for task " +
                     std::string(to_string(split.schema.task_id)));
  }
  std::vector<Prediction> predictions;
  predictions.reserve(split.examples.size());
  for (const auto& ex : split.examples) {
    predictions.push_back(predict(model, ex.text));
  }
  return predictions;
}

void save_model(const SoftmaxClassifier& model,
                const std::filesystem::path& path) {
  model.validate();

  nlohmann::json header{
      {"schema", model.schema},
      {"featurizer", model.featurizer},
      {"classes", model.num_classes()},
      {"dimension", model.featurizer.dimension},
  };
  const std::string header_text = header.dump();

  std::string blob;
  blob.reserve(header_text.size() +
               static_cast<std::size_t>(model.weights.size() + model.bias.size()) *
                   sizeof(double) +
               64);
  append_bytes(blob, kModelMagic, sizeof(kModelMagic));
  append_pod(blob, kModelFormatVersion);
  append_pod(blob, static_cast<std::uint64_t>(header_text.size()));
  blob += header_text;
  append_bytes(blob, model.weights.data(),
               static_cast<std::size_t>(model.weights.size()) * sizeof(double));
  append_bytes(blob, model.bias.data(),
               static_cast<std::size_t>(model.bias.size()) * sizeof(double));
  const std::uint64_t checksum = fnv1a64(blob);
  append_pod(blob, checksum);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !out.write(blob.data(), static_cast<std::streamsize>(blob.size()))) {
    throw InputError("cannot write model file: " + path.string());
  }
}

SoftmaxClassifier load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("model file not found: " + path.string());
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string blob = std::move(buf).str();

  if (blob.size() < sizeof(kModelMagic) + sizeof(std::uint32_t) +
                        sizeof(std::uint64_t) * 2 ||
      std::memcmp(blob.data(), kModelMagic, sizeof(kModelMagic)) != 0) {
    throw InputError("corrupt model file: bad magic in " + path.string());
  }
  const std::uint64_t stored_checksum = [&] {
    std::size_t offset = blob.size() - sizeof(std::uint64_t);
    return read_pod<std::uint64_t>(blob, offset);
  }();
  const std::uint64_t actual_checksum =
      fnv1a64(std::string_view(blob).substr(0, blob.size() - sizeof(std::uint64_t)));
  if (stored_checksum != actual_checksum) {
    throw InputError("corrupt model file: checksum mismatch in " +
                     path.string());
  }

  std::size_t offset = sizeof(kModelMagic);
  const auto version = read_pod<std::uint32_t>(blob, offset);
  if (version != kModelFormatVersion) {
    throw InputError("model format version mismatch: file has " +
                     std::to_string(version) + ", expected " +
                     std::to_string(kModelFormatVersion));
  }
  const auto header_len = read_pod<std::uint64_t>(blob, offset);
  if (offset + header_len > blob.size()) {
    throw InputError("corrupt model file: truncated header");
  }
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(blob.substr(offset, header_len));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("corrupt model file: bad header: ") + e.what());
  }
  offset += header_len;

  SoftmaxClassifier model;
  model.schema = header.at("schema").get<LabelSchema>();
  model.featurizer = header.at("featurizer").get<FeaturizerConfig>();
  const auto classes = header.at("classes").get<Eigen::Index>();
  const auto dimension = header.at("dimension").get<Eigen::Index>();

  const std::size_t weight_bytes =
      static_cast<std::size_t>(classes) * static_cast<std::size_t>(dimension) *
      sizeof(double);
  const std::size_t bias_bytes = static_cast<std::size_t>(classes) * sizeof(double);
  if (offset + weight_bytes + bias_bytes + sizeof(std::uint64_t) != blob.size()) {
    throw InputError("corrupt model file: parameter block size mismatch");
  }
  model.weights.resize(classes, dimension);
  std::memcpy(model.weights.data(), blob.data() + offset, weight_bytes);
  offset += weight_bytes;
  model.bias.resize(classes);
  std::memcpy(model.bias.data(), blob.data() + offset, bias_bytes);

  model.validate();
  return model;
}

}  // namespace lipi
