// Copyright 2026 The qmcc developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <limits>
#include <set>
#include <vector>

#include "qmcc/trainer.hpp"
#include "support/test_helpers.hpp"

using qmcc::Batch;
using qmcc::Checkpoint;
using qmcc::EncodedSample;
using qmcc::Rng;
using qmcc::TrainConfig;
using qmcc::TrainData;
using qmcc::TrainResult;
namespace fs = std::filesystem;

namespace {

// Small separable synthetic problem: class c concentrates mass on feature c.
TrainData toy_data(int num_classes, int per_class, int test_per_class,
                   std::uint64_t seed) {
  Rng rng(seed);
  TrainData data;
  data.train_per_class.assign(static_cast<std::size_t>(num_classes), {});
  const auto sample = [&](int cls) {
    std::vector<double> features(6, 0.0);
    for (double& f : features) {
      f = rng.uniform(0.0, 0.25);
    }
    features[static_cast<std::size_t>(cls)] = rng.uniform(0.75, 1.0);
    return EncodedSample{features, cls};
  };
  for (int cls = 0; cls < num_classes; ++cls) {
    for (int n = 0; n < per_class; ++n) {
      data.train_per_class[static_cast<std::size_t>(cls)].push_back(sample(cls));
    }
  }
  for (int cls = 0; cls < num_classes; ++cls) {
    for (int n = 0; n < test_per_class; ++n) {
      data.test.push_back(sample(cls));
    }
  }
  return data;
}

TrainConfig toy_config() {
  TrainConfig config;
  config.class_labels = {3, 8};
  config.train_per_class = 6;
  config.repetitions = 1;
  config.max_iterations = 10;
  config.tolerance = 1e-12;
  config.seed = 7;
  return config;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("qmcc_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("make_batches zips shuffled per-class pools") {
  SECTION("single tuple per batch") {
    const TrainData data = toy_data(2, 3, 0, 1);
    const Batch batch = qmcc::make_batches(data.train_per_class, 1, 5);
    REQUIRE(batch.size() == 1);
    REQUIRE(batch[0].size() == 2);
    CHECK(batch[0][0].label == 0);
    CHECK(batch[0][1].label == 1);
  }
  SECTION("same seed gives identical batches") {
    const TrainData data = toy_data(2, 8, 0, 2);
    const Batch a = qmcc::make_batches(data.train_per_class, 5, 99);
    const Batch b = qmcc::make_batches(data.train_per_class, 5, 99);
    REQUIRE(a.size() == b.size());
    for (std::size_t r = 0; r < a.size(); ++r) {
      for (std::size_t i = 0; i < a[r].size(); ++i) {
        CHECK(a[r][i].features == b[r][i].features);
      }
    }
  }
  SECTION("five classes, every tuple holds each label exactly once") {
    const TrainData data = toy_data(5, 210, 0, 3);
    const Batch batch = qmcc::make_batches(data.train_per_class, 200, 11);
    REQUIRE(batch.size() == 200);
    for (const auto& tuple : batch) {
      std::set<int> labels;
      for (const auto& sample : tuple) {
        labels.insert(sample.label);
      }
      REQUIRE(labels == std::set<int>{0, 1, 2, 3, 4});
    }
  }
  SECTION("insufficient samples rejected") {
    const TrainData data = toy_data(2, 3, 0, 4);
    CHECK_THROWS_AS(qmcc::make_batches(data.train_per_class, 4, 1),
                    qmcc::DataError);
  }
  SECTION("mislabeled pool rejected") {
    TrainData data = toy_data(2, 3, 0, 5);
    data.train_per_class[0][1].label = 1;
    CHECK_THROWS_AS(qmcc::make_batches(data.train_per_class, 2, 1),
                    qmcc::DataError);
  }
}

TEST_CASE("train validates its configuration") {
  const TrainData data = toy_data(2, 6, 2, 8);
  SECTION("zero iterations forbidden") {
    TrainConfig config = toy_config();
    config.max_iterations = 0;
    CHECK_THROWS_AS(qmcc::train(config, data), qmcc::ConfigError);
  }
  SECTION("non-positive tolerance forbidden") {
    TrainConfig config = toy_config();
    config.tolerance = 0.0;
    CHECK_THROWS_AS(qmcc::train(config, data), qmcc::ConfigError);
  }
  SECTION("duplicate class labels forbidden") {
    TrainConfig config = toy_config();
    config.class_labels = {3, 3};
    CHECK_THROWS_AS(qmcc::train(config, data), qmcc::ConfigError);
  }
  SECTION("features outside [0,1] rejected") {
    TrainConfig config = toy_config();
    TrainData bad = data;
    bad.train_per_class[0][0].features[0] = 1.5;
    CHECK_THROWS_AS(qmcc::train(config, bad), qmcc::DataError);
  }
}

TEST_CASE("infinite tolerance stops after the three-delta streak") {
  TrainConfig config = toy_config();
  config.tolerance = std::numeric_limits<double>::infinity();
  config.max_iterations = 50;
  const TrainData data = toy_data(2, 6, 2, 9);
  const TrainResult result = qmcc::train(config, data);
  CHECK(result.converged);
  // Deltas exist from iteration 2 on, so the streak of 3 completes at 4.
  REQUIRE(result.metrics.size() == 4);
}

TEST_CASE("training is deterministic and lowers the cost") {
  TrainConfig config = toy_config();
  const TrainData data = toy_data(2, 6, 4, 10);
  const TrainResult a = qmcc::train(config, data);
  const TrainResult b = qmcc::train(config, data);

  REQUIRE(a.metrics.size() == b.metrics.size());
  for (std::size_t i = 0; i < a.metrics.size(); ++i) {
    CHECK(a.metrics[i].cost == b.metrics[i].cost);
    CHECK(a.metrics[i].train_accuracy == b.metrics[i].train_accuracy);
    CHECK(a.metrics[i].test_accuracy == b.metrics[i].test_accuracy);
  }
  for (std::size_t c = 0; c < a.weights.size(); ++c) {
    REQUIRE(a.weights.raw()[c] == b.weights.raw()[c]);
  }
  CHECK(a.metrics.back().cost < a.metrics.front().cost);

  TrainConfig other_seed = config;
  other_seed.seed = config.seed + 1;
  const TrainResult c = qmcc::train(other_seed, data);
  CHECK(c.metrics.front().cost != a.metrics.front().cost);
}

TEST_CASE("checkpoints round-trip and replay the recorded cost") {
  const fs::path dir = fresh_dir("ckpt");
  TrainConfig config = toy_config();
  config.max_iterations = 5;
  const TrainData data = toy_data(2, 6, 2, 11);
  const TrainResult result = qmcc::train(config, data, dir);

  REQUIRE(fs::exists(dir / "checkpoint_0001.json"));
  REQUIRE(fs::exists(dir / qmcc::checkpoint_filename(
                               result.metrics.back().iteration)));

  // Rebuild the batch exactly as train() does to recompute offline.
  qmcc::Rng master(config.seed);
  const qmcc::ParameterTensor init =
      qmcc::ParameterTensor::random_init(result.shape, master);
  const Batch batch = qmcc::make_batches(data.train_per_class,
                                         config.train_per_class, master.raw());
  for (const qmcc::MetricsRow& row : result.metrics) {
    const Checkpoint checkpoint =
        qmcc::load_checkpoint(dir / qmcc::checkpoint_filename(row.iteration));
    CHECK(checkpoint.iteration == row.iteration);
    CHECK(checkpoint.seed == config.seed);
    CHECK(checkpoint.class_labels == config.class_labels);
    // Bit-exact replay of the recorded cost from the stored weights.
    CHECK(qmcc::cost(result.shape, batch, checkpoint.weights) == row.cost);
  }

  // The first checkpoint stores the seeded initialization itself.
  const Checkpoint first = qmcc::load_checkpoint(dir / "checkpoint_0001.json");
  for (std::size_t c = 0; c < init.size(); ++c) {
    REQUIRE(first.weights.raw()[c] == init.raw()[c]);
  }
  fs::remove_all(dir);
}

TEST_CASE("checkpoint loader rejects corrupt files") {
  const fs::path dir = fresh_dir("ckpt_bad");
  const fs::path path = dir / "bad.json";
  {
    std::ofstream out(path);
    out << "{\"format_version\": 1}";
  }
  CHECK_THROWS_AS(qmcc::load_checkpoint(path), qmcc::FormatError);
  {
    std::ofstream out(path);
    out << "not json";
  }
  CHECK_THROWS_AS(qmcc::load_checkpoint(path), qmcc::FormatError);
  CHECK_THROWS_AS(qmcc::load_checkpoint(dir / "missing.json"), qmcc::DataError);
  fs::remove_all(dir);
}

TEST_CASE("metrics csv uses the pinned schema") {
  const fs::path dir = fresh_dir("metrics");
  std::vector<qmcc::MetricsRow> rows{{1, 0.75, 0.5, 0.25, 12.5},
                                     {2, 0.5, 0.75, 0.5, 25.0}};
  qmcc::write_metrics_csv(dir / "metrics.csv", rows);
  std::ifstream in(dir / "metrics.csv");
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "iter,cost,train_acc,test_acc,elapsed_ms");
  REQUIRE(std::getline(in, line));
  CHECK(line == "1,0.75,0.5,0.25,12.5");
  REQUIRE(std::getline(in, line));
  CHECK(line == "2,0.5,0.75,0.5,25");
  CHECK_FALSE(std::getline(in, line));
  fs::remove_all(dir);
}
