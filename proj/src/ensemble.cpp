/*!
 * Copyright (c) 2026 the lipi authors. All rights reserved.
 * Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
 */
#include "lipi/ensemble.hpp"

#include "lipi/error.hpp"

namespace lipi {

std::string_view to_string(DecidedBy d) {
  return d == DecidedBy::majority ? "majority" : "fallback";
}

const LabelSchema& EnsembleSpec::schema() const {
  if (members.empty()) {
    throw InputError("ensemble has no members");
  }
  return members.front().schema;
}

void EnsembleSpec::validate() const {
  if (members.size() < 2) {
    throw InputError("ensemble requires at least 2 members, got " +
                     std::to_string(members.size()));
  }
  if (fallback_index >= members.size()) {
    throw InputError("ensemble fallback index " +
                     std::to_string(fallback_index) + " out of range for " +
                     std::to_string(members.size()) + " members");
  }
  for (std::size_t i = 1; i < members.size(); ++i) {
    if (members[i].schema != members.front().schema) {
      throw InputError("ensemble member " + std::to_string(i) +
                       " has a different label schema");
    }
  }
}

VoteOutcome vote(std::span<const int> predictions, std::size_t fallback_index) {
  if (predictions.empty()) {
    throw InputError("vote requires at least one prediction");
  }
  if (fallback_index >= predictions.size()) {
    throw InputError("vote fallback index out of range");
  }
  VoteOutcome outcome;
  for (int label : predictions) {
    ++outcome.vote_counts[label];
  }
  int best_count = 0;
  int winners = 0;
  for (const auto& [label, count] : outcome.vote_counts) {
    if (count > best_count) {
      best_count = count;
      outcome.label = label;
      winners = 1;
    } else if (count == best_count) {
      ++winners;
    }
  }
  if (winners == 1) {
    outcome.decided_by = DecidedBy::majority;
  } else {
    outcome.decided_by = DecidedBy::fallback;
    outcome.label = predictions[fallback_index];
  }
  return outcome;
}

VoteOutcome ensemble_predict(const EnsembleSpec& spec, std::string_view text) {
  spec.validate();
  std::vector<int> labels;
  labels.reserve(spec.members.size());
  for (std::size_t i = 0; i < spec.members.size(); ++i) {
    try {
      labels.push_back(predict(spec.members[i], text).label);
    } catch (const std::exception& e) {
      throw Error("ensemble member " + std::to_string(i) +
                  " failed to predict: " + e.what());
    }
  }
  return vote(labels, spec.fallback_index);
}

std::vector<VoteOutcome> ensemble_predict_split(const EnsembleSpec& spec,
                                                const DatasetSplit& split) {
  spec.validate();
  if (split.schema != spec.schema()) {
    throw InputError("schema mismatch: ensemble is for task " +
                     std::string(to_string(spec.schema().task_id)) +
                     ", split is for task " +
                     std::string(to_string(split.schema.task_id)));
  }
  std::vector<VoteOutcome> outcomes;
  outcomes.reserve(split.examples.size());
  for (const auto& ex : split.examples) {
    outcomes.push_back(ensemble_predict(spec, ex.text));
  }
  return outcomes;
}

}  // namespace lipi
