/*!
 * Copyright (c) 2026 the lipi authors. All rights reserved.
 * Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
 */
#pragma once

#include <map>
#include <span>
#include <string_view>
#include <vector>

#include "lipi/classifier.hpp"

namespace lipi {

/// Ordered member models plus the member whose prediction is used when no
/// unique plurality exists.
struct EnsembleSpec {
  std::vector<SoftmaxClassifier> members;
  std::size_t fallback_index = 0;

  const LabelSchema& schema() const;
  /// >= 2 members, valid fallback index, one shared schema.
  void validate() const;
};

enum class DecidedBy { majority, fallback };

std::string_view to_string(DecidedBy d);

struct VoteOutcome {
  int label = 0;
  std::map<int, int> vote_counts;  // only labels that received votes
  DecidedBy decided_by = DecidedBy::majority;
};

// If exactly one label attains the maximal vote count, that label wins with
// decided_by = majority. Otherwise (tied maximal counts) the outcome is
// predictions[fallback_index] with decided_by = fallback.
VoteOutcome vote(std::span<const int> predictions, std::size_t fallback_index);

/// Collects each member's predicted label in member order, then votes.
VoteOutcome ensemble_predict(const EnsembleSpec& spec, std::string_view text);

/// Order-preserving map of ensemble_predict.
std::vector<VoteOutcome> ensemble_predict_split(const EnsembleSpec& spec,
                                                const DatasetSplit& split);

}  // namespace lipi
