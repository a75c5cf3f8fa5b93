#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "lipi/ensemble.hpp"
#include "lipi/error.hpp"
#include "test_util.hpp"

using namespace lipi;

namespace {

// A model whose argmax is a fixed label for every input: bias-only.
SoftmaxClassifier constant_model(int label, const LabelSchema& schema) {
  SoftmaxClassifier model;
  model.schema = schema;
  model.featurizer.dimension = 1u << 10;
  model.weights = Eigen::MatrixXd::Zero(schema.num_classes(),
                                        model.featurizer.dimension);
  model.bias = Eigen::VectorXd::Zero(schema.num_classes());
  model.bias(label) = 10.0;
  return model;
}

// Reference implementation of the voting rule by direct enumeration: a label
// with a unique maximal count wins, anything else falls back.
int vote_oracle(const std::vector<int>& predictions, std::size_t fallback,
                bool* used_fallback = nullptr) {
  std::map<int, int> counts;
  for (int p : predictions) ++counts[p];
  int best = -1, best_count = 0, winners = 0;
  for (const auto& [label, count] : counts) {
    if (count > best_count) {
      best = label;
      best_count = count;
      winners = 1;
    } else if (count == best_count) {
      ++winners;
    }
  }
  if (used_fallback) *used_fallback = winners != 1;
  return winners == 1 ? best : predictions[fallback];
}

}  // namespace

TEST_CASE("clear majorities win") {
  const auto outcome = vote(std::vector<int>{2, 2, 0}, 1);
  CHECK(outcome.label == 2);
  CHECK(outcome.decided_by == DecidedBy::majority);
  CHECK(outcome.vote_counts.at(2) == 2);
  CHECK(outcome.vote_counts.at(0) == 1);
}

TEST_CASE("three-way disagreement uses the fallback member") {
  const auto outcome = vote(std::vector<int>{0, 1, 2}, 1);
  CHECK(outcome.label == 1);
  CHECK(outcome.decided_by == DecidedBy::fallback);
}

TEST_CASE("tied maximal counts fall back") {
  const auto outcome = vote(std::vector<int>{0, 0, 1, 1}, 3);
  CHECK(outcome.label == 1);
  CHECK(outcome.decided_by == DecidedBy::fallback);
}

TEST_CASE("vote counts always sum to the member count") {
  std::mt19937_64 rng(3);
  for (int it = 0; it < 300; ++it) {
    const std::size_t members = 1 + rng() % 7;
    std::vector<int> predictions;
    for (std::size_t i = 0; i < members; ++i) {
      predictions.push_back(static_cast<int>(rng() % 5));
    }
    const std::size_t fallback = rng() % members;
    const auto outcome = vote(predictions, fallback);
    int total = 0;
    for (const auto& [label, count] : outcome.vote_counts) total += count;
    CHECK(total == static_cast<int>(members));
    bool used_fallback = false;
    CHECK(outcome.label == vote_oracle(predictions, fallback, &used_fallback));
    CHECK((outcome.decided_by == DecidedBy::fallback) == used_fallback);
  }
}

TEST_CASE("exhaustive three-member triples over five labels") {
  // Two-way agreement always decides; only three-way disagreement falls
  // back. Checked for every triple and every fallback choice.
  for (int a = 0; a < 5; ++a) {
    for (int b = 0; b < 5; ++b) {
      for (int c = 0; c < 5; ++c) {
        for (std::size_t fallback = 0; fallback < 3; ++fallback) {
          const std::vector<int> triple{a, b, c};
          const auto outcome = vote(triple, fallback);
          const bool all_distinct = a != b && b != c && a != c;
          if (all_distinct) {
            CHECK(outcome.decided_by == DecidedBy::fallback);
            CHECK(outcome.label == triple[fallback]);
          } else {
            CHECK(outcome.decided_by == DecidedBy::majority);
            // The agreeing pair's label wins.
            const int expected = (a == b || a == c) ? a : b;
            CHECK(outcome.label == expected);
          }
        }
      }
    }
  }
}

TEST_CASE("a strict majority wins regardless of the fallback") {
  std::mt19937_64 rng(5);
  for (int it = 0; it < 200; ++it) {
    const std::size_t members = 3 + rng() % 5;
    const std::size_t quorum = (members + 1) / 2 + (members % 2 == 0 ? 1 : 0);
    const int winner = static_cast<int>(rng() % 4);
    std::vector<int> predictions(members);
    for (std::size_t i = 0; i < members; ++i) {
      predictions[i] = i < quorum ? winner : static_cast<int>(rng() % 4) + 4;
    }
    std::shuffle(predictions.begin(), predictions.end(), rng);
    for (std::size_t fallback = 0; fallback < members; ++fallback) {
      CHECK(vote(predictions, fallback).label == winner);
    }
  }
}

TEST_CASE("fallback fires exactly when the maximal count is tied") {
  std::mt19937_64 rng(7);
  for (int it = 0; it < 500; ++it) {
    const std::size_t members = 2 + rng() % 6;
    std::vector<int> predictions;
    for (std::size_t i = 0; i < members; ++i) {
      predictions.push_back(static_cast<int>(rng() % 4));
    }
    const auto outcome = vote(predictions, 0);
    int max_count = 0;
    for (const auto& [label, count] : outcome.vote_counts) {
      max_count = std::max(max_count, count);
    }
    int at_max = 0;
    for (const auto& [label, count] : outcome.vote_counts) {
      if (count == max_count) ++at_max;
    }
    CHECK((outcome.decided_by == DecidedBy::fallback) == (at_max >= 2));
  }
}

TEST_CASE("vote validates its inputs") {
  CHECK_THROWS_AS(vote(std::vector<int>{}, 0), InputError);
  CHECK_THROWS_AS(vote(std::vector<int>{1, 2}, 2), InputError);
}

TEST_CASE("identical members always agree") {
  const auto schema = LabelSchema::for_task(TaskId::A);
  EnsembleSpec spec;
  spec.members = {constant_model(3, schema), constant_model(3, schema),
                  constant_model(3, schema)};
  spec.fallback_index = 1;
  const auto outcome = ensemble_predict(spec, "कुछ");
  CHECK(outcome.label == 3);
  CHECK(outcome.decided_by == DecidedBy::majority);
}

TEST_CASE("one dissenting member is outvoted") {
  const auto schema = LabelSchema::for_task(TaskId::A);
  EnsembleSpec spec;
  spec.members = {constant_model(0, schema), constant_model(4, schema),
                  constant_model(4, schema)};
  spec.fallback_index = 0;
  CHECK(ensemble_predict(spec, "कुछ").label == 4);
}

TEST_CASE("ensemble_predict composes member predictions and vote") {
  const auto schema = LabelSchema::for_task(TaskId::A);
  EnsembleSpec spec;
  spec.members = {constant_model(0, schema), constant_model(1, schema),
                  constant_model(2, schema)};
  spec.fallback_index = 2;
  const std::string text = "नमूना";
  std::vector<int> individual;
  for (const auto& member : spec.members) {
    individual.push_back(predict(member, text).label);
  }
  const auto direct = vote(individual, spec.fallback_index);
  const auto composed = ensemble_predict(spec, text);
  CHECK(composed.label == direct.label);
  CHECK(composed.decided_by == direct.decided_by);
  CHECK(composed.label == 2);  // all-distinct: fallback member
}

TEST_CASE("permuting members while tracking the fallback model is invariant") {
  const auto schema = LabelSchema::for_task(TaskId::A);
  // Three genuinely different predictors.
  const auto split = testutil::make_separable_split(schema, 30, SplitName::train, 61);
  FeaturizerConfig features;
  features.dimension = 1u << 12;
  TrainConfig tc;
  tc.epochs = 2;
  tc.seed = 1;
  std::vector<SoftmaxClassifier> models;
  for (int i = 0; i < 3; ++i) {
    tc.seed = static_cast<std::uint64_t>(i + 1);
    tc.epochs = i + 1;  // vary the training budget per member
    models.push_back(train(split, features, tc).model);
  }

  EnsembleSpec original;
  original.members = {models[0], models[1], models[2]};
  original.fallback_index = 1;  // models[1] is the fallback model

  EnsembleSpec permuted;
  permuted.members = {models[2], models[1], models[0]};
  permuted.fallback_index = 1;  // still models[1]

  std::mt19937_64 rng(67);
  for (int i = 0; i < 60; ++i) {
    const auto text = testutil::random_string(testutil::class_alphabet(i % 5), rng);
    CHECK(ensemble_predict(original, text).label ==
          ensemble_predict(permuted, text).label);
  }
}

TEST_CASE("ensemble_predict_split is the elementwise map") {
  const auto schema = LabelSchema::for_task(TaskId::B);
  EnsembleSpec spec;
  spec.members = {constant_model(0, schema), constant_model(1, schema),
                  constant_model(1, schema)};
  spec.fallback_index = 0;
  const auto split = testutil::make_separable_split(schema, 4, SplitName::dev, 71);

  const auto outcomes = ensemble_predict_split(spec, split);
  REQUIRE(outcomes.size() == split.size());
  for (std::size_t i = 0; i < split.size(); ++i) {
    CHECK(outcomes[i].label ==
          ensemble_predict(spec, split.examples[i].text).label);
  }

  DatasetSplit empty;
  empty.schema = schema;
  CHECK(ensemble_predict_split(spec, empty).empty());
}

TEST_CASE("ensemble validation catches structural mistakes") {
  const auto schema_a = LabelSchema::for_task(TaskId::A);
  const auto schema_b = LabelSchema::for_task(TaskId::B);

  EnsembleSpec single;
  single.members = {constant_model(0, schema_a)};
  single.fallback_index = 0;
  CHECK_THROWS_AS(single.validate(), InputError);

  EnsembleSpec bad_fallback;
  bad_fallback.members = {constant_model(0, schema_a),
                          constant_model(1, schema_a)};
  bad_fallback.fallback_index = 2;
  CHECK_THROWS_AS(bad_fallback.validate(), InputError);

  EnsembleSpec mixed;
  mixed.members = {constant_model(0, schema_a), constant_model(0, schema_b)};
  mixed.fallback_index = 0;
  CHECK_THROWS_AS(mixed.validate(), InputError);
}
