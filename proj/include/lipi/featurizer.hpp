/*!
 * Copyright (c) 2026 the lipi authors. All rights reserved.
 * Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
 */
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "lipi/corpus.hpp"

namespace lipi {

enum class Normalization { none, l2 };

std::string_view to_string(Normalization n);
Normalization normalization_from_string(std::string_view s);

struct FeaturizerConfig {
  int n_min = 1;
  int n_max = 3;
  std::uint32_t dimension = 1u << 18;
  Normalization normalize = Normalization::l2;
  bool lowercase = false;  // ASCII-only; Devanagari has no case

  /// dimension must be a power of two (>= 2); 1 <= n_min <= n_max <= 8.
  void validate() const;

  friend bool operator==(const FeaturizerConfig&, const FeaturizerConfig&) = default;
};

void to_json(nlohmann::json& j, const FeaturizerConfig& config);
void from_json(const nlohmann::json& j, FeaturizerConfig& config);

/// Sparse count vector; entries are (index, value) with strictly increasing
/// indices and nonzero values.
struct FeatureVector {
  std::uint32_t dimension = 0;
  std::vector<std::pair<std::uint32_t, double>> entries;

  double squared_norm() const;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

// FNV-1a 64-bit over a byte string (offset basis 0xcbf29ce484222325, prime
// 0x100000001b3). This is the published bucket hash; changing it changes
// every stored model, so it is fixed.
std::uint64_t fnv1a64(std::string_view bytes);

// Counts every character n-gram for n in [n_min, n_max] over the
// NFC-normalized code point sequence, bucketing each n-gram's UTF-8 bytes by
// fnv1a64(ngram) % dimension, then normalizes per config. Deterministic;
// empty text yields the zero vector.
FeatureVector featurize(std::string_view text, const FeaturizerConfig& config);

/// Order-preserving map of featurize over a split.
std::vector<FeatureVector> featurize_split(const DatasetSplit& split,
                                           const FeaturizerConfig& config);

/// Debug dump, space-separated "index:value" pairs.
std::string to_sparse_text(const FeatureVector& v);

}  // namespace lipi
