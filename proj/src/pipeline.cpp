/*!
 * Copyright (c) 2026 the lipi authors. All rights reserved.
 * Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
 */
#include "lipi/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <set>
#include <tuple>
#include <utility>

#include "lipi/error.hpp"
#include "lipi/prompts.hpp"

namespace lipi {

namespace {

bool valid_model_name(std::string_view name) {
  if (name.empty()) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
           c == '-' || c == '.';
  });
}

std::filesystem::path resolve_path(const std::filesystem::path& base,
                                   const std::filesystem::path& p) {
  if (p.empty() || p.is_absolute()) return p;
  return base / p;
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !out.write(content.data(),
                         static_cast<std::streamsize>(content.size()))) {
    throw InputError("cannot write file: " + path.string());
  }
}

nlohmann::json read_json_file(const std::filesystem::path& path,
                              std::string_view what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError(std::string(what) + " not found: " + path.string());
  }
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

PipelineConfig PipelineConfig::load(const std::filesystem::path& path,
                                    const ConfigOverrides& overrides) {
  const nlohmann::json j = read_json_file(path, "config file");
  return from_json(j, path.parent_path(), overrides);
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j,
                                         const std::filesystem::path& base_dir,
                                         const ConfigOverrides& overrides) {
  if (!j.is_object()) {
    throw InputError("config must be a JSON object");
  }
  if (j.contains("version") && j["version"].get<int>() != 1) {
    throw InputError("unsupported config version " +
                     j["version"].dump());
  }
  PipelineConfig config;
  if (j.contains("task")) {
    config.task = task_from_string(j["task"].get<std::string>());
  }
  if (overrides.task) config.task = *overrides.task;

  if (j.contains("data")) {
    const auto& data = j["data"];
    if (data.contains("format")) {
      config.format = format_from_string(data["format"].get<std::string>());
    }
    for (const auto& [key, member] :
         {std::pair{"train", &PipelineConfig::train_path},
          std::pair{"dev", &PipelineConfig::dev_path},
          std::pair{"test", &PipelineConfig::test_path}}) {
      if (data.contains(key)) {
        config.*member =
            resolve_path(base_dir, data[key].get<std::string>());
      }
    }
  }
  if (j.contains("featurizer")) {
    config.featurizer = j["featurizer"].get<FeaturizerConfig>();
  }

  config.seed = 0;
  if (j.contains("seed")) config.seed = j["seed"].get<std::uint64_t>();
  if (const char* env_seed = std::getenv("LIPI_SEED")) {
    config.seed = std::strtoull(env_seed, nullptr, 10);
  }
  if (overrides.seed) config.seed = *overrides.seed;

  if (j.contains("models")) {
    for (const auto& m : j["models"]) {
      ModelSpec spec;
      spec.name = m.at("name").get<std::string>();
      spec.train = m.get<TrainConfig>();
      if (!m.contains("seed")) spec.train.seed = config.seed;
      config.models.push_back(std::move(spec));
    }
  }
  if (j.contains("ensemble") && !j["ensemble"].is_null()) {
    EnsembleConfig ens;
    ens.members = j["ensemble"].at("members").get<std::vector<std::string>>();
    ens.fallback = j["ensemble"].at("fallback").get<std::string>();
    config.ensemble = std::move(ens);
  }
  if (j.contains("grid_search") && !j["grid_search"].is_null()) {
    const auto& g = j["grid_search"];
    if (g.contains("alpha")) {
      config.grid.alphas = g["alpha"].get<std::vector<double>>();
    }
    if (g.contains("gamma")) {
      config.grid.gammas = g["gamma"].get<std::vector<double>>();
    }
    if (g.contains("base_model")) {
      config.grid.base_model = g["base_model"].get<std::string>();
    }
  }

  if (j.contains("output_dir")) {
    config.output_dir =
        resolve_path(base_dir, j["output_dir"].get<std::string>());
  }
  if (const char* env_out = std::getenv("LIPI_OUTPUT_DIR")) {
    config.output_dir = env_out;
  }
  if (overrides.output_dir) config.output_dir = *overrides.output_dir;

  if (j.contains("prompts_dir")) {
    config.prompts_dir =
        resolve_path(base_dir, j["prompts_dir"].get<std::string>());
  }

  config.validate();
  return config;
}

void PipelineConfig::validate() const {
  featurizer.validate();
  std::set<std::string> names;
  for (const auto& m : models) {
    if (!valid_model_name(m.name)) {
      throw InputError("invalid model name '" + m.name +
                       "' (use letters, digits, '_', '-', '.')");
    }
    if (!names.insert(m.name).second) {
      throw InputError("duplicate model name '" + m.name + "'");
    }
    m.train.validate();
  }
  if (ensemble) {
    if (ensemble->members.size() < 2) {
      throw InputError("ensemble requires at least 2 members");
    }
    for (const auto& member : ensemble->members) {
      if (!names.count(member)) {
        throw InputError("ensemble member '" + member +
                         "' is not a configured model");
      }
    }
    if (std::find(ensemble->members.begin(), ensemble->members.end(),
                  ensemble->fallback) == ensemble->members.end()) {
      throw InputError("ensemble fallback '" + ensemble->fallback +
                       "' is not a member");
    }
  }
  if (grid.alphas.empty() || grid.gammas.empty()) {
    throw InputError("grid search requires non-empty alpha and gamma grids");
  }
  if (!grid.base_model.empty() && !names.count(grid.base_model)) {
    throw InputError("grid_search base_model '" + grid.base_model +
                     "' is not a configured model");
  }
}

const ModelSpec& PipelineConfig::model(std::string_view name) const {
  for (const auto& m : models) {
    if (m.name == name) return m;
  }
  throw InputError("unknown model '" + std::string(name) + "'");
}

std::filesystem::path PipelineConfig::model_path(std::string_view name,
                                                 bool final) const {
  return models_dir() /
         (std::string(name) + (final ? "-final" : "") + ".model");
}

Pipeline::Pipeline(PipelineConfig config) : config_(std::move(config)) {
  config_.validate();
}

std::filesystem::path Pipeline::split_path(SplitName name) const {
  switch (name) {
    case SplitName::train:
      return config_.train_path;
    case SplitName::dev:
      return config_.dev_path;
    case SplitName::test:
      return config_.test_path;
  }
  return {};
}

DatasetSplit Pipeline::load_split(SplitName name, Phase phase,
                                  bool has_labels) {
  // Access audit: the selection phase reads no datasets at all, and neither
  // selection nor finalize may ever read the test split.
  const bool allowed = [&] {
    switch (phase) {
      case Phase::train:
      case Phase::finalize:
      case Phase::grid_search:
        return name == SplitName::train || name == SplitName::dev;
      case Phase::select:
        return false;
      case Phase::predict:
        return name == SplitName::test;
      case Phase::other:
        return true;
    }
    return false;
  }();
  if (!allowed) {
    throw Error("internal: phase attempted to read the " +
                std::string(to_string(name)) + " split");
  }
  const auto path = split_path(name);
  if (path.empty()) {
    throw InputError("no " + std::string(to_string(name)) +
                     " dataset configured");
  }
  splits_read_.push_back(name);
  return load_dataset(path, config_.format, config_.schema(), has_labels, name);
}

void Pipeline::ensure_output_dirs() const {
  std::filesystem::create_directories(config_.models_dir());
  std::filesystem::create_directories(config_.reports_dir());
  std::filesystem::create_directories(config_.predictions_dir());
}

void Pipeline::write_report_files(const std::string& stem,
                                  const Evaluation& eval,
                                  const nlohmann::json& extra) {
  nlohmann::json j = extra;
  j["metrics"] = eval.report;
  write_text_file(config_.reports_dir() / (stem + ".json"), j.dump(2) + "\n");
  write_text_file(config_.reports_dir() / (stem + ".txt"),
                  to_table(eval.report, eval.confusion.schema));
  write_text_file(config_.reports_dir() / (stem + ".confusion.csv"),
                  to_csv(eval.confusion));
}

Pipeline::TrainSummary Pipeline::run_train(const std::string& model_name) {
  const ModelSpec& spec = config_.model(model_name);
  ensure_output_dirs();

  const DatasetSplit train_split =
      load_split(SplitName::train, Phase::train, true);
  const DatasetSplit dev_split = load_split(SplitName::dev, Phase::train, true);

  TrainResult result = train(train_split, config_.featurizer, spec.train);
  const auto model_file = config_.model_path(model_name);
  save_model(result.model, model_file);

  const Evaluation eval = evaluate(result.model, dev_split);
  write_report_files(model_name + ".dev", eval,
                     {{"model", model_name},
                      {"split", "dev"},
                      {"epoch_loss", result.epoch_loss}});
  return {model_name, model_file, eval.report};
}

std::vector<std::string> Pipeline::run_select(int top_k) {
  if (top_k <= 0) {
    throw InputError("top_k must be >= 1");
  }
  if (config_.models.empty()) {
    throw InputError("no models configured");
  }
  std::vector<std::pair<std::string, MetricsReport>> reports;
  for (const auto& m : config_.models) {
    const auto path = config_.reports_dir() / (m.name + ".dev.json");
    const nlohmann::json j = read_json_file(path, "dev report");
    reports.emplace_back(m.name, j.at("metrics").get<MetricsReport>());
  }
  std::vector<std::string> ranked = rank_models(reports, RankKey::macro_f1);

  nlohmann::json ranking = nlohmann::json::array();
  for (const auto& name : ranked) {
    const auto it = std::find_if(reports.begin(), reports.end(),
                                 [&](const auto& r) { return r.first == name; });
    ranking.push_back(
        {{"name", name}, {"macro_f1", it->second.macro_f1}});
  }
  if (std::cmp_greater(ranked.size(), top_k)) {
    ranked.resize(static_cast<std::size_t>(top_k));
  }
  const nlohmann::json manifest{{"selected", ranked}, {"ranking", ranking}};
  write_text_file(config_.output_dir / "selection.json",
                  manifest.dump(2) + "\n");
  return ranked;
}

Pipeline::FinalizeSummary Pipeline::run_finalize() {
  const auto manifest_path = config_.output_dir / "selection.json";
  const nlohmann::json manifest =
      read_json_file(manifest_path, "selection manifest");
  const auto selected = manifest.at("selected").get<std::vector<std::string>>();
  if (selected.empty()) {
    throw InputError("selection manifest lists no models");
  }
  ensure_output_dirs();

  const DatasetSplit train_split =
      load_split(SplitName::train, Phase::finalize, true);
  const DatasetSplit dev_split =
      load_split(SplitName::dev, Phase::finalize, true);
  const DatasetSplit merged = merge_splits(train_split, dev_split);

  FinalizeSummary summary;
  summary.examples_trained_on = merged.size();
  for (const auto& name : selected) {
    const ModelSpec& spec = config_.model(name);
    TrainResult result = train(merged, config_.featurizer, spec.train);
    const auto path = config_.model_path(name, /*final=*/true);
    save_model(result.model, path);
    summary.names.push_back(name);
    summary.model_paths.push_back(path);
  }
  const nlohmann::json record{
      {"models", summary.names},
      {"examples_trained_on", summary.examples_trained_on},
      {"train_size", train_split.size()},
      {"dev_size", dev_split.size()},
  };
  write_text_file(config_.reports_dir() / "finalize.json",
                  record.dump(2) + "\n");
  return summary;
}

SoftmaxClassifier Pipeline::load_named_model(const std::string& name) const {
  const auto final_path = config_.model_path(name, /*final=*/true);
  if (std::filesystem::exists(final_path)) {
    return load_model(final_path);
  }
  const auto base_path = config_.model_path(name);
  if (std::filesystem::exists(base_path)) {
    return load_model(base_path);
  }
  throw InputError("no trained artifact for model '" + name + "' (looked for " +
                   final_path.string() + " and " + base_path.string() + ")");
}

Pipeline::PredictSummary Pipeline::run_predict(
    const std::optional<std::string>& model_name) {
  ensure_output_dirs();
  const bool labeled =
      file_has_label_field(split_path(SplitName::test), config_.format);
  const DatasetSplit test_split =
      load_split(SplitName::test, Phase::predict, labeled);
  const LabelSchema schema = config_.schema();

  PredictSummary summary;
  summary.examples = test_split.size();
  summary.predictions_path =
      config_.predictions_dir() / "test_predictions.csv";

  std::vector<int> predicted;
  predicted.reserve(test_split.size());
  std::string csv;

  if (model_name) {
    const SoftmaxClassifier model = load_named_model(*model_name);
    const auto predictions = predict_split(model, test_split);
    csv = "index,label\n";
    for (std::size_t i = 0; i < predictions.size(); ++i) {
      predicted.push_back(predictions[i].label);
      csv += std::to_string(i) + "," + schema.name_of(predictions[i].label) +
             "\n";
    }
  } else {
    if (!config_.ensemble) {
      throw InputError(
          "no ensemble configured; pass a model name or add an ensemble block");
    }
    EnsembleSpec spec;
    for (const auto& member : config_.ensemble->members) {
      spec.members.push_back(load_named_model(member));
    }
    const auto fb = std::find(config_.ensemble->members.begin(),
                              config_.ensemble->members.end(),
                              config_.ensemble->fallback);
    spec.fallback_index = static_cast<std::size_t>(
        std::distance(config_.ensemble->members.begin(), fb));
    spec.validate();

    const auto outcomes = ensemble_predict_split(spec, test_split);
    csv = "index,label,decided_by\n";
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      predicted.push_back(outcomes[i].label);
      csv += std::to_string(i) + "," + schema.name_of(outcomes[i].label) + "," +
             std::string(to_string(outcomes[i].decided_by)) + "\n";
    }
  }
  write_text_file(summary.predictions_path, csv);

  if (labeled && !test_split.examples.empty()) {
    std::vector<int> gold;
    gold.reserve(test_split.size());
    for (const auto& ex : test_split.examples) gold.push_back(*ex.label);
    Evaluation eval;
    eval.confusion = confusion(gold, predicted, schema);
    eval.report = report(eval.confusion);
    write_report_files("test", eval,
                       {{"split", "test"},
                        {"predictor", model_name ? nlohmann::json(*model_name)
                                                 : nlohmann::json("ensemble")}});
    summary.test_report = eval.report;
  }
  return summary;
}

Pipeline::GridSummary Pipeline::run_grid_search() {
  ensure_output_dirs();
  const GridSearchConfig& grid = config_.grid;

  TrainConfig base;
  if (!grid.base_model.empty()) {
    base = config_.model(grid.base_model).train;
  } else if (!config_.models.empty()) {
    base = config_.models.front().train;
  } else {
    base.seed = config_.seed;
  }
  base.auto_class_weights = false;

  const DatasetSplit train_split =
      load_split(SplitName::train, Phase::grid_search, true);
  const DatasetSplit dev_split =
      load_split(SplitName::dev, Phase::grid_search, true);

  GridSummary summary;
  for (double alpha : grid.alphas) {
    for (double gamma : grid.gammas) {
      TrainConfig cell_config = base;
      cell_config.loss = LossSpec{};
      cell_config.loss.kind = LossKind::focal;
      cell_config.loss.alpha = alpha;
      cell_config.loss.gamma = gamma;
      const TrainResult result =
          train(train_split, config_.featurizer, cell_config);
      const Evaluation eval = evaluate(result.model, dev_split);
      summary.cells.push_back({alpha, gamma, eval.report.macro_f1});
    }
  }
  // Best dev macro-F1; ties prefer the smaller gamma, then the smaller alpha.
  summary.best = summary.cells.front();
  for (const auto& cell : summary.cells) {
    const auto as_key = [](const GridCell& c) {
      return std::tuple(-c.dev_macro_f1, c.gamma, c.alpha);
    };
    if (as_key(cell) < as_key(summary.best)) summary.best = cell;
  }

  nlohmann::json cells = nlohmann::json::array();
  std::string csv = "alpha,gamma,dev_macro_f1\n";
  for (const auto& cell : summary.cells) {
    cells.push_back({{"alpha", cell.alpha},
                     {"gamma", cell.gamma},
                     {"dev_macro_f1", cell.dev_macro_f1}});
    csv += format_double(cell.alpha) + "," + format_double(cell.gamma) + "," +
           format_double(cell.dev_macro_f1) + "\n";
  }
  const nlohmann::json record{
      {"best",
       {{"alpha", summary.best.alpha},
        {"gamma", summary.best.gamma},
        {"dev_macro_f1", summary.best.dev_macro_f1}}},
      {"cells", cells}};
  write_text_file(config_.output_dir / "gridsearch.json", record.dump(2) + "\n");
  write_text_file(config_.output_dir / "gridsearch.csv", csv);
  return summary;
}

std::size_t Pipeline::run_render_prompts(SplitName split, bool with_labels,
                                         std::ostream& out) {
  const PromptTemplate tmpl =
      PromptTemplate::load(config_.task, config_.prompts_dir);
  const DatasetSplit data = load_split(split, Phase::other, with_labels);

  std::optional<std::vector<FewShotExample>> examples;
  if (config_.task == TaskId::B) {
    // Five demonstrations from the head of the train split.
    const DatasetSplit train_split =
        split == SplitName::train
            ? data
            : load_split(SplitName::train, Phase::other, true);
    if (train_split.size() < 5) {
      throw InputError("task B prompts need at least 5 train examples");
    }
    examples.emplace();
    for (std::size_t i = 0; i < 5; ++i) {
      const auto& ex = train_split.examples[i];
      if (!ex.label) {
        throw InputError("task B demonstration example lacks a label");
      }
      examples->push_back({ex.text, std::to_string(*ex.label)});
    }
  }

  std::size_t count = 0;
  for (std::size_t i = 0; i < data.examples.size(); ++i) {
    const auto& ex = data.examples[i];
    std::optional<std::string> label;
    if (with_labels) {
      if (!ex.label) {
        throw InputError("example " + std::to_string(i) +
                         " lacks a label; use inference mode");
      }
      label = std::to_string(*ex.label);
    }
    const std::string prompt = render(tmpl, ex.text, label, examples);
    const nlohmann::json record{{"index", i}, {"prompt", prompt}};
    out << record.dump() << '\n';
    ++count;
  }
  return count;
}

Evaluation Pipeline::run_report(const std::string& model_name, SplitName split,
                                std::ostream& human_out) {
  ensure_output_dirs();
  const SoftmaxClassifier model = load_named_model(model_name);
  const DatasetSplit data = load_split(split, Phase::other, true);
  const Evaluation eval = evaluate(model, data);
  write_report_files(model_name + "." + std::string(to_string(split)), eval,
                     {{"model", model_name},
                      {"split", std::string(to_string(split))}});
  human_out << to_table(eval.report, eval.confusion.schema);
  return eval;
}

}  // namespace lipi
