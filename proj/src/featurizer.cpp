/*!
 * Copyright (c) 2026 the lipi authors. All rights reserved.
 * Licensed under the Apache License, Version 2.0. See LICENSE in the project root.
 */
#include "lipi/featurizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_map>

#include "lipi/error.hpp"
#include "lipi/unicode.hpp"

namespace lipi {

std::string_view to_string(Normalization n) {
  return n == Normalization::l2 ? "l2" : "none";
}

Normalization normalization_from_string(std::string_view s) {
  if (s == "l2") return Normalization::l2;
  if (s == "none") return Normalization::none;
  throw InputError("unknown normalization '" + std::string(s) +
                   "' (expected none or l2)");
}

void FeaturizerConfig::validate() const {
  if (n_min < 1 || n_max < n_min || n_max > 8) {
    throw InputError("featurizer requires 1 <= n_min <= n_max <= 8");
  }
  if (dimension < 2 || (dimension & (dimension - 1)) != 0) {
    throw InputError("featurizer dimension must be a power of two >= 2");
  }
}

void to_json(nlohmann::json& j, const FeaturizerConfig& config) {
  j = nlohmann::json{{"n_min", config.n_min},
                     {"n_max", config.n_max},
                     {"dimension", config.dimension},
                     {"normalize", std::string(to_string(config.normalize))},
                     {"lowercase", config.lowercase}};
}

void from_json(const nlohmann::json& j, FeaturizerConfig& config) {
  config = FeaturizerConfig{};
  if (j.contains("n_min")) config.n_min = j.at("n_min").get<int>();
  if (j.contains("n_max")) config.n_max = j.at("n_max").get<int>();
  if (j.contains("dimension"))
    config.dimension = j.at("dimension").get<std::uint32_t>();
  if (j.contains("normalize"))
    config.normalize =
        normalization_from_string(j.at("normalize").get<std::string>());
  if (j.contains("lowercase")) config.lowercase = j.at("lowercase").get<bool>();
  config.validate();
}

double FeatureVector::squared_norm() const {
  double sum = 0.0;
  for (const auto& [index, value] : entries) sum += value * value;
  return sum;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (char c : bytes) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ull;
  }
  return hash;
}

FeatureVector featurize(std::string_view text, const FeaturizerConfig& config) {
  config.validate();
  FeatureVector out;
  out.dimension = config.dimension;

  std::u32string cps = unicode::nfc_devanagari(unicode::decode_utf8(text));
  if (config.lowercase) {
    for (char32_t& c : cps) {
      if (c >= U'A' && c <= U'Z') c += 0x20;
    }
  }
  if (cps.empty()) return out;

  std::unordered_map<std::uint32_t, double> counts;
  std::string ngram_bytes;
  const auto len = cps.size();
  for (int n = config.n_min; n <= config.n_max; ++n) {
    const auto width = static_cast<std::size_t>(n);
    if (width > len) break;
    for (std::size_t i = 0; i + width <= len; ++i) {
      ngram_bytes = unicode::encode_utf8(
          std::u32string_view(cps.data() + i, width));
      const auto bucket =
          static_cast<std::uint32_t>(fnv1a64(ngram_bytes) % config.dimension);
      counts[bucket] += 1.0;
    }
  }

  out.entries.assign(counts.begin(), counts.end());
  std::sort(out.entries.begin(), out.entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  if (config.normalize == Normalization::l2) {
    const double norm = std::sqrt(out.squared_norm());
    if (norm > 0.0) {
      for (auto& [index, value] : out.entries) value /= norm;
    }
  }
  return out;
}

std::vector<FeatureVector> featurize_split(const DatasetSplit& split,
                                           const FeaturizerConfig& config) {
  std::vector<FeatureVector> vectors;
  vectors.reserve(split.examples.size());
  for (const auto& ex : split.examples) {
    vectors.push_back(featurize(ex.text, config));
  }
  return vectors;
}

std::string to_sparse_text(const FeatureVector& v) {
  std::string out;
  char buf[64];
  for (const auto& [index, value] : v.entries) {
    if (!out.empty()) out.push_back(' ');
    std::snprintf(buf, sizeof(buf), "%u:%.17g", index, value);
    out += buf;
  }
  return out;
}

}  // namespace lipi
