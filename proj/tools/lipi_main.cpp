/*!
 * Copyright (c) 2026 the lipi authors. All rights reserved.
 * Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
 */
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "lipi/error.hpp"
#include "lipi/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;

struct CommonArgs {
  std::string config_path;
  std::string task;
  std::string out;
  std::string seed;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "pipeline config file (JSON)")
      ->required();
  cmd->add_option("--task", args.task, "override the config task (A, B, or C)");
  cmd->add_option("--out", args.out, "override the output directory");
  cmd->add_option("--seed", args.seed, "override the pipeline seed")
      ->check(CLI::Number);
}

lipi::PipelineConfig load_config(const CommonArgs& args) {
  lipi::ConfigOverrides overrides;
  if (!args.task.empty()) overrides.task = lipi::task_from_string(args.task);
  if (!args.out.empty()) overrides.output_dir = args.out;
  if (!args.seed.empty()) overrides.seed = std::stoull(args.seed);
  return lipi::PipelineConfig::load(args.config_path, overrides);
}

void print_report(const lipi::MetricsReport& report) {
  std::printf("macro_f1=%.4f macro_recall=%.4f macro_precision=%.4f micro_f1=%.4f\n",
              report.macro_f1, report.macro_recall, report.macro_precision,
              report.micro_f1);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lipi: Devanagari text classification pipeline"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string model_name;
  int top_k = 1;
  std::string split_name = "test";
  std::string mode = "inference";
  std::string prompts_out;

  CLI::App* cmd_train = app.add_subcommand(
      "train", "train one model on the train split and score it on dev");
  add_common(cmd_train, args);
  cmd_train->add_option("--model", model_name, "model name from the config")
      ->required();

  CLI::App* cmd_select = app.add_subcommand(
      "select", "rank models by dev macro-F1 and keep the top k");
  add_common(cmd_select, args);
  cmd_select->add_option("--top-k", top_k, "how many models to keep")
      ->check(CLI::PositiveNumber);

  CLI::App* cmd_finalize = app.add_subcommand(
      "finalize", "retrain the selected models on train+dev");
  add_common(cmd_finalize, args);

  CLI::App* cmd_predict = app.add_subcommand(
      "predict",
      "predict the test split with the configured ensemble or one model");
  add_common(cmd_predict, args);
  cmd_predict->add_option("--model", model_name,
                          "predict with this single model instead of the ensemble");

  CLI::App* cmd_grid = app.add_subcommand(
      "gridsearch", "train focal-loss models over the (alpha, gamma) grid");
  add_common(cmd_grid, args);

  CLI::App* cmd_prompts = app.add_subcommand(
      "render-prompts", "render instruction prompts for a split as JSONL");
  add_common(cmd_prompts, args);
  cmd_prompts->add_option("--split", split_name, "train, dev, or test");
  cmd_prompts->add_option("--mode", mode, "train (fill labels) or inference")
      ->check(CLI::IsMember({"train", "inference"}));
  cmd_prompts->add_option("--out-file", prompts_out,
                          "write JSONL here instead of stdout");

  CLI::App* cmd_report = app.add_subcommand(
      "report", "evaluate a stored model on a labeled split");
  add_common(cmd_report, args);
  cmd_report->add_option("--model", model_name, "model name")->required();
  cmd_report->add_option("--split", split_name, "train, dev, or test");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    lipi::Pipeline pipeline(load_config(args));

    if (cmd_train->parsed()) {
      const auto summary = pipeline.run_train(model_name);
      std::printf("trained %s -> %s\n", summary.name.c_str(),
                  summary.model_path.string().c_str());
      print_report(summary.dev_report);
    } else if (cmd_select->parsed()) {
      const auto selected = pipeline.run_select(top_k);
      for (const auto& name : selected) std::printf("%s\n", name.c_str());
    } else if (cmd_finalize->parsed()) {
      const auto summary = pipeline.run_finalize();
      for (std::size_t i = 0; i < summary.names.size(); ++i) {
        std::printf("finalized %s on %zu examples -> %s\n",
                    summary.names[i].c_str(), summary.examples_trained_on,
                    summary.model_paths[i].string().c_str());
      }
    } else if (cmd_predict->parsed()) {
      const std::optional<std::string> single =
          model_name.empty() ? std::nullopt
                             : std::optional<std::string>(model_name);
      const auto summary = pipeline.run_predict(single);
      std::printf("wrote %zu predictions -> %s\n", summary.examples,
                  summary.predictions_path.string().c_str());
      if (summary.test_report) print_report(*summary.test_report);
    } else if (cmd_grid->parsed()) {
      const auto summary = pipeline.run_grid_search();
      std::printf("best alpha=%g gamma=%g dev_macro_f1=%.4f\n",
                  summary.best.alpha, summary.best.gamma,
                  summary.best.dev_macro_f1);
    } else if (cmd_prompts->parsed()) {
      const auto split = lipi::split_from_string(split_name);
      const bool with_labels = mode == "train";
      if (!prompts_out.empty()) {
        std::ofstream out(prompts_out, std::ios::binary | std::ios::trunc);
        if (!out) {
          throw lipi::InputError("cannot write " + prompts_out);
        }
        const auto n = pipeline.run_render_prompts(split, with_labels, out);
        std::printf("wrote %zu prompts -> %s\n", n, prompts_out.c_str());
      } else {
        pipeline.run_render_prompts(split, with_labels, std::cout);
      }
    } else if (cmd_report->parsed()) {
      const auto split = lipi::split_from_string(split_name);
      pipeline.run_report(model_name, split, std::cout);
    }
    return kExitOk;
  } catch (const lipi::InputError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kExitInternal;
  }
}
