#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "lipi/corpus.hpp"
#include "lipi/error.hpp"
#include "test_util.hpp"

using namespace lipi;

namespace {

const LabelSchema kSchemaA = LabelSchema::for_task(TaskId::A);
const LabelSchema kSchemaB = LabelSchema::for_task(TaskId::B);

DatasetSplit load_csv_text(const std::string& content, const LabelSchema& schema,
                           bool has_labels) {
  testutil::TempDir dir("corpus");
  const auto path = dir.path() / "data.csv";
  testutil::write_file(path, content);
  return load_dataset(path, FileFormat::csv, schema, has_labels);
}

}  // namespace

TEST_CASE("schemas carry the fixed label sets") {
  CHECK(kSchemaA.num_classes() == 5);
  CHECK(kSchemaA.labels == std::vector<std::string>{"Nepali", "Marathi",
                                                    "Sanskrit", "Bhojpuri",
                                                    "Hindi"});
  CHECK(kSchemaB.labels == std::vector<std::string>{"Non-hate", "Hate"});
  CHECK(LabelSchema::for_task(TaskId::C).labels ==
        std::vector<std::string>{"Individual", "Organization", "Community"});
  CHECK(kSchemaA.code_of("hindi") == 4);
  CHECK(kSchemaB.code_of("HATE") == 1);
  CHECK(!kSchemaA.code_of("English").has_value());
}

TEST_CASE("csv loads integer labels directly") {
  const auto split =
      load_csv_text("text,label\nपहिलो,0\nदूसरा,4\nतीसरा,2\n", kSchemaA, true);
  REQUIRE(split.size() == 3);
  CHECK(*split.examples[0].label == 0);
  CHECK(*split.examples[1].label == 4);
  CHECK(*split.examples[2].label == 2);
  CHECK(split.examples[0].text == "पहिलो");
}

TEST_CASE("label names map to codes case-insensitively") {
  const auto split = load_csv_text("text,label\nकुछ,Hindi\n", kSchemaA, true);
  REQUIRE(split.size() == 1);
  CHECK(*split.examples[0].label == 4);
}

TEST_CASE("out-of-range label codes report the line") {
  try {
    load_csv_text("text,label\nठीक,1\nगलत,5\n", kSchemaA, true);
    FAIL("expected InputError");
  } catch (const InputError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("label code out of range") != std::string::npos);
    CHECK(msg.find(":3:") != std::string::npos);  // record on line 3
  }
}

TEST_CASE("unknown label strings and empty texts are record errors") {
  testutil::TempDir dir("corpus");
  const auto path = dir.path() / "bad.csv";
  testutil::write_file(path, "text,label\nठीक,0\n,1\nकुछ,Klingon\n");
  const auto report =
      load_dataset_lenient(path, FileFormat::csv, kSchemaB, true);
  CHECK(report.records_seen == 3);
  CHECK(report.split.size() == 1);
  REQUIRE(report.errors.size() == 2);
  CHECK(report.errors[0].line == 3);
  CHECK(report.errors[0].message.find("empty text") != std::string::npos);
  CHECK(report.errors[1].line == 4);
  CHECK(report.errors[1].message.find("unknown label") != std::string::npos);
  // Nothing dropped silently.
  CHECK(report.records_seen == report.split.size() + report.errors.size());
}

TEST_CASE("missing file reports dataset not found") {
  CHECK_THROWS_WITH_AS(
      load_dataset("/nonexistent/nowhere.csv", FileFormat::csv, kSchemaA, true),
      doctest::Contains("dataset not found"), InputError);
}

TEST_CASE("quoted csv fields keep delimiters and quotes") {
  const auto split = load_csv_text(
      "text,label\n\"एक, दो\",0\n\"कहा \"\"ठीक\"\" है\",1\n", kSchemaB, true);
  REQUIRE(split.size() == 2);
  CHECK(split.examples[0].text == "एक, दो");
  CHECK(split.examples[1].text == "कहा \"ठीक\" है");
}

TEST_CASE("positional columns work when no text header is present") {
  testutil::TempDir dir("corpus");
  const auto path = dir.path() / "positional.tsv";
  testutil::write_file(path, "sentence\ttag\nनमूना\t1\n");
  const auto split = load_dataset(path, FileFormat::tsv, kSchemaB, true);
  REQUIRE(split.size() == 1);
  CHECK(split.examples[0].text == "नमूना");
  CHECK(*split.examples[0].label == 1);
}

TEST_CASE("jsonl loads string and integer labels") {
  testutil::TempDir dir("corpus");
  const auto path = dir.path() / "data.jsonl";
  testutil::write_file(path,
                       "{\"text\": \"पहिलो\", \"label\": \"Nepali\"}\n"
                       "{\"text\": \"आखिरी\", \"label\": 4}\n");
  const auto split = load_dataset(path, FileFormat::jsonl, kSchemaA, true);
  REQUIRE(split.size() == 2);
  CHECK(*split.examples[0].label == 0);
  CHECK(*split.examples[1].label == 4);
}

TEST_CASE("unlabeled loads ignore the label field") {
  testutil::TempDir dir("corpus");
  const auto path = dir.path() / "test.csv";
  testutil::write_file(path, "text,label\nकुछ,1\n");
  const auto split = load_dataset(path, FileFormat::csv, kSchemaB, false,
                                  SplitName::test);
  REQUIRE(split.size() == 1);
  CHECK(!split.examples[0].label.has_value());
  CHECK(file_has_label_field(path, FileFormat::csv));

  const auto bare = dir.path() / "bare.csv";
  testutil::write_file(bare, "text\nकुछ\n");
  CHECK(!file_has_label_field(bare, FileFormat::csv));
}

TEST_CASE("save/load round trip preserves texts and codes") {
  std::mt19937_64 rng(7);
  DatasetSplit split;
  split.schema = kSchemaA;
  for (int i = 0; i < 50; ++i) {
    std::string text = testutil::random_string(testutil::class_alphabet(i % 5), rng);
    if (i % 7 == 0) text += ", \"quoted\"\nsecond line";
    split.examples.push_back({text, i % 5});
  }
  testutil::TempDir dir("roundtrip");
  for (const auto format : {FileFormat::csv, FileFormat::tsv, FileFormat::jsonl}) {
    const auto path = dir.path() / ("data." + std::string(to_string(format)));
    save_dataset(split, path, format);
    const auto loaded = load_dataset(path, format, kSchemaA, true);
    REQUIRE(loaded.size() == split.size());
    CHECK(loaded.examples == split.examples);
  }
}

TEST_CASE("class distribution counts labels and keeps zero classes") {
  DatasetSplit split;
  split.schema = kSchemaB;
  split.examples = {{"क", 1}, {"ख", 1}, {"ग", 0}};
  const auto dist = class_distribution(split);
  CHECK(dist.counts == std::vector<std::int64_t>{1, 2});
  CHECK(dist.total == 3);

  DatasetSplit empty;
  empty.schema = kSchemaA;
  const auto empty_dist = class_distribution(empty);
  CHECK(empty_dist.total == 0);
  CHECK(empty_dist.counts == std::vector<std::int64_t>(5, 0));

  DatasetSplit unlabeled;
  unlabeled.schema = kSchemaB;
  unlabeled.examples = {{"क", std::nullopt}};
  CHECK_THROWS_AS(class_distribution(unlabeled), InputError);
}

TEST_CASE("merge concatenates in order and checks schemas") {
  DatasetSplit a, b;
  a.schema = b.schema = kSchemaB;
  a.examples = {{"एक", 0}, {"दो", 1}};
  b.examples = {{"तीन", 1}, {"चार", 0}, {"पाँच", 1}};
  const auto merged = merge_splits(a, b);
  REQUIRE(merged.size() == 5);
  CHECK(merged.examples[0].text == "एक");
  CHECK(merged.examples[4].text == "पाँच");

  DatasetSplit empty;
  empty.schema = kSchemaB;
  CHECK(merge_splits(a, empty).examples == a.examples);

  DatasetSplit other;
  other.schema = kSchemaA;
  other.examples = {{"छह", 0}};
  CHECK_THROWS_WITH_AS(merge_splits(a, other), doctest::Contains("schema mismatch"),
                       InputError);
}

TEST_CASE("distribution of a merge is the sum of distributions") {
  auto a = testutil::make_separable_split(kSchemaB, 13, SplitName::train, 1);
  auto b = testutil::make_separable_split(kSchemaB, 8, SplitName::dev, 2);
  const auto da = class_distribution(a);
  const auto db = class_distribution(b);
  const auto dm = class_distribution(merge_splits(a, b));
  for (std::size_t c = 0; c < dm.counts.size(); ++c) {
    CHECK(dm.counts[c] == da.counts[c] + db.counts[c]);
  }
  CHECK(dm.total == da.total + db.total);
}

TEST_CASE("class weights follow total / (classes * count)") {
  // Hate-speech train counts from the published distribution.
  ClassDistribution dist;
  dist.counts = {16805, 2214};
  dist.total = 19019;
  const auto weights = class_weights(dist);
  CHECK(weights[0] == doctest::Approx(19019.0 / (2.0 * 16805.0)).epsilon(1e-12));
  CHECK(weights[1] == doctest::Approx(19019.0 / (2.0 * 2214.0)).epsilon(1e-12));
  CHECK(weights[0] == doctest::Approx(0.56590).epsilon(1e-3));

  // Frequency-weighted mean is exactly 1.
  double mean = 0.0;
  for (std::size_t c = 0; c < weights.size(); ++c) {
    mean += static_cast<double>(dist.counts[c]) /
            static_cast<double>(dist.total) * weights[c];
  }
  CHECK(std::abs(mean - 1.0) < 1e-9);
}

TEST_CASE("balanced counts give unit weights; zero counts are an error") {
  ClassDistribution balanced;
  balanced.counts = {10, 10, 10};
  balanced.total = 30;
  for (double w : class_weights(balanced)) CHECK(w == 1.0);

  ClassDistribution hand;
  hand.counts = {1, 1, 2};
  hand.total = 4;
  const auto weights = class_weights(hand);
  CHECK(weights[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(weights[1] == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(weights[2] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

  ClassDistribution degenerate;
  degenerate.counts = {3, 0};
  degenerate.total = 3;
  CHECK_THROWS_AS(class_weights(degenerate), InputError);
}

TEST_CASE("published reference distributions are internally consistent") {
  // Totals match their per-class sums, and the hate-speech train class
  // feeds the target-detection task exactly.
  for (const auto task : {TaskId::A, TaskId::B, TaskId::C}) {
    for (const auto split : {SplitName::train, SplitName::dev, SplitName::test}) {
      const auto dist = reference_distribution(task, split);
      std::int64_t sum = 0;
      for (auto c : dist.counts) sum += c;
      CHECK(sum == dist.total);
    }
  }
  const auto a_train = reference_distribution(TaskId::A, SplitName::train);
  CHECK(a_train.counts ==
        std::vector<std::int64_t>{12544, 11034, 10996, 10184, 7664});
  CHECK(a_train.total == 52422);
  const auto b_train = reference_distribution(TaskId::B, SplitName::train);
  CHECK(b_train.total == 19019);
  const auto c_train = reference_distribution(TaskId::C, SplitName::train);
  CHECK(c_train.total == b_train.counts[1]);  // every hateful post has a target
}

TEST_CASE("merging train and dev of the hate-speech shape gives 23095") {
  // Splits sized after the published distribution (19019 + 4076).
  DatasetSplit train, dev;
  train.schema = dev.schema = kSchemaB;
  const auto b_train = reference_distribution(TaskId::B, SplitName::train);
  const auto b_dev = reference_distribution(TaskId::B, SplitName::dev);
  for (int c = 0; c < 2; ++c) {
    for (std::int64_t i = 0; i < b_train.counts[static_cast<std::size_t>(c)]; ++i)
      train.examples.push_back({"क", c});
    for (std::int64_t i = 0; i < b_dev.counts[static_cast<std::size_t>(c)]; ++i)
      dev.examples.push_back({"ख", c});
  }
  CHECK(train.size() == 19019);
  CHECK(dev.size() == 4076);
  CHECK(merge_splits(train, dev).size() == 23095);
}
