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

#pragma once

#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "qmcc/classifier.hpp"
#include "qmcc/error.hpp"
#include "qmcc/objective.hpp"
#include "qmcc/rng.hpp"

namespace qmcc {

/// Everything a training run depends on besides the data.
struct TrainConfig {
  std::vector<int> class_labels;  ///< dataset labels in class-id order
  int train_per_class = 0;        ///< tuples per batch (samples per class)
  int repetitions = 1;            ///< data-loading rounds m
  int max_iterations = 0;
  double tolerance = 1e-6;  ///< cost-delta convergence threshold
  std::uint64_t seed = 0;
  double grad_eps = 1e-4;
  AdamParams adam;
};

/// One line of the training log.
struct MetricsRow {
  int iteration = 0;
  double cost = 0.0;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  double elapsed_ms = 0.0;  ///< wall time since the run started
};

struct TrainData {
  std::vector<std::vector<EncodedSample>> train_per_class;  ///< index = class
  std::vector<EncodedSample> test;                          ///< may be empty
};

struct TrainResult {
  CircuitShape shape;
  ParameterTensor weights;
  std::vector<MetricsRow> metrics;
  bool converged = false;
};

/// Shortest representation that parses back to the same double.
inline std::string format_double(double value) {
  std::array<char, 32> buf;
  const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), result.ptr);
}

/// Shuffles each class pool with the seeded generator and zips the first
/// `tuples` positions into training tuples, one sample of every class each.
inline Batch make_batches(
    const std::vector<std::vector<EncodedSample>>& per_class, int tuples,
    std::uint64_t seed) {
  if (tuples < 1) {
    throw ConfigError("batch needs at least one tuple per class");
  }
  if (per_class.size() < 2) {
    throw ShapeError("need per-class sample lists for at least 2 classes");
  }
  Rng rng(seed);
  std::vector<std::vector<EncodedSample>> shuffled;
  shuffled.reserve(per_class.size());
  for (std::size_t cls = 0; cls < per_class.size(); ++cls) {
    if (per_class[cls].size() < static_cast<std::size_t>(tuples)) {
      throw DataError("class " + std::to_string(cls) + " has " +
                      std::to_string(per_class[cls].size()) +
                      " samples, need " + std::to_string(tuples));
    }
    for (const EncodedSample& sample : per_class[cls]) {
      if (sample.label != static_cast<int>(cls)) {
        throw DataError("sample labeled " + std::to_string(sample.label) +
                        " found in the pool of class " + std::to_string(cls));
      }
    }
    shuffled.push_back(per_class[cls]);
    rng.shuffle(shuffled.back());
  }
  Batch batch;
  batch.reserve(static_cast<std::size_t>(tuples));
  for (int r = 0; r < tuples; ++r) {
    SampleTuple tuple;
    tuple.reserve(per_class.size());
    for (std::size_t cls = 0; cls < per_class.size(); ++cls) {
      tuple.push_back(shuffled[cls][static_cast<std::size_t>(r)]);
    }
    batch.push_back(std::move(tuple));
  }
  return batch;
}

/// Versioned snapshot of one training iteration.
struct Checkpoint {
  static constexpr int kFormatVersion = 1;

  int format_version = kFormatVersion;
  CircuitShape shape;
  std::vector<int> class_labels;
  std::uint64_t seed = 0;
  int iteration = 0;
  ParameterTensor weights;
  ParameterTensor adam_first_moment;
  ParameterTensor adam_second_moment;
  long adam_step_count = 0;
};

inline void save_checkpoint(const std::filesystem::path& path,
                            const Checkpoint& checkpoint) {
  nlohmann::json doc;
  doc["format_version"] = checkpoint.format_version;
  doc["shape"] = {{"num_classes", checkpoint.shape.num_classes},
                  {"register_width", checkpoint.shape.register_width},
                  {"repetitions", checkpoint.shape.repetitions},
                  {"encoding_units", checkpoint.shape.encoding_units}};
  doc["classes"] = checkpoint.class_labels;
  doc["seed"] = checkpoint.seed;
  doc["iteration"] = checkpoint.iteration;
  doc["weights"] = std::vector<double>(checkpoint.weights.raw().begin(),
                                       checkpoint.weights.raw().end());
  doc["adam"] = {
      {"step", checkpoint.adam_step_count},
      {"first_moment",
       std::vector<double>(checkpoint.adam_first_moment.raw().begin(),
                           checkpoint.adam_first_moment.raw().end())},
      {"second_moment",
       std::vector<double>(checkpoint.adam_second_moment.raw().begin(),
                           checkpoint.adam_second_moment.raw().end())}};
  std::ofstream out(path);
  if (!out) {
    throw DataError("cannot write checkpoint " + path.string());
  }
  out << doc.dump(2) << '\n';
}

inline Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open checkpoint " + path.string());
  }
  try {
    const nlohmann::json doc = nlohmann::json::parse(in);
    Checkpoint checkpoint;
    checkpoint.format_version = doc.at("format_version").get<int>();
    if (checkpoint.format_version != Checkpoint::kFormatVersion) {
      throw FormatError("unsupported checkpoint format version " +
                        std::to_string(checkpoint.format_version));
    }
    const nlohmann::json& shape = doc.at("shape");
    checkpoint.shape.num_classes = shape.at("num_classes").get<int>();
    checkpoint.shape.register_width = shape.at("register_width").get<int>();
    checkpoint.shape.repetitions = shape.at("repetitions").get<int>();
    checkpoint.shape.encoding_units = shape.at("encoding_units").get<int>();
    checkpoint.shape.validate();
    checkpoint.class_labels = doc.at("classes").get<std::vector<int>>();
    checkpoint.seed = doc.at("seed").get<std::uint64_t>();
    checkpoint.iteration = doc.at("iteration").get<int>();

    const auto load_tensor = [&](const nlohmann::json& values) {
      ParameterTensor tensor(checkpoint.shape);
      const auto flat = values.get<std::vector<double>>();
      if (flat.size() != tensor.size()) {
        throw FormatError("checkpoint tensor has " +
                          std::to_string(flat.size()) + " entries, expected " +
                          std::to_string(tensor.size()));
      }
      std::copy(flat.begin(), flat.end(), tensor.raw().begin());
      return tensor;
    };
    checkpoint.weights = load_tensor(doc.at("weights"));
    checkpoint.adam_first_moment = load_tensor(doc.at("adam").at("first_moment"));
    checkpoint.adam_second_moment =
        load_tensor(doc.at("adam").at("second_moment"));
    checkpoint.adam_step_count = doc.at("adam").at("step").get<long>();
    return checkpoint;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("malformed checkpoint " + path.string() + ": " +
                      e.what());
  }
}

inline std::filesystem::path checkpoint_filename(int iteration) {
  char name[32];
  std::snprintf(name, sizeof(name), "checkpoint_%04d.json", iteration);
  return name;
}

inline void write_metrics_csv(const std::filesystem::path& path,
                              std::span<const MetricsRow> rows) {
  std::ofstream out(path);
  if (!out) {
    throw DataError("cannot write metrics file " + path.string());
  }
  out << "iter,cost,train_acc,test_acc,elapsed_ms\n";
  for (const MetricsRow& row : rows) {
    out << row.iteration << ',' << format_double(row.cost) << ','
        << format_double(row.train_accuracy) << ','
        << format_double(row.test_accuracy) << ','
        << format_double(row.elapsed_ms) << '\n';
  }
}

namespace detail {

inline void validate_train_inputs(const TrainConfig& config,
                                  const TrainData& data) {
  if (config.class_labels.size() < 2) {
    throw ConfigError("need at least 2 classes");
  }
  for (std::size_t i = 0; i < config.class_labels.size(); ++i) {
    for (std::size_t j = i + 1; j < config.class_labels.size(); ++j) {
      if (config.class_labels[i] == config.class_labels[j]) {
        throw ConfigError("duplicate class label " +
                          std::to_string(config.class_labels[i]));
      }
    }
  }
  if (config.train_per_class < 1) {
    throw ConfigError("train_per_class must be >= 1");
  }
  if (config.max_iterations < 1) {
    throw ConfigError("iterations must be >= 1");
  }
  if (!(config.tolerance > 0.0)) {
    throw ConfigError("tolerance must be > 0");
  }
  if (!(config.grad_eps > 0.0)) {
    throw ConfigError("grad_eps must be > 0");
  }
  if (data.train_per_class.size() != config.class_labels.size()) {
    throw ShapeError("expected per-class sample lists for " +
                     std::to_string(config.class_labels.size()) + " classes");
  }

  std::size_t padded_dim = 0;
  const auto check_sample = [&](const EncodedSample& sample, int max_label) {
    if (sample.features.empty() || sample.features.size() % 3 != 0) {
      throw ShapeError("sample feature length must be a multiple of 3");
    }
    if (padded_dim == 0) {
      padded_dim = sample.features.size();
    } else if (sample.features.size() != padded_dim) {
      throw ShapeError("inconsistent feature lengths across samples");
    }
    if (sample.label < 0 || sample.label >= max_label) {
      throw DataError("sample label " + std::to_string(sample.label) +
                      " out of range");
    }
    for (const double f : sample.features) {
      if (!std::isfinite(f) || f < 0.0 || f > 1.0) {
        throw DataError("features must lie in [0, 1]");
      }
    }
  };
  const int num_classes = static_cast<int>(config.class_labels.size());
  for (const auto& pool : data.train_per_class) {
    for (const EncodedSample& sample : pool) {
      check_sample(sample, num_classes);
    }
  }
  for (const EncodedSample& sample : data.test) {
    check_sample(sample, num_classes);
  }
}

}  // namespace detail

/// The hybrid optimization loop: seeded weight init, then per iteration an
/// exact cost, accuracy metrics, a checkpoint, and a finite-difference Adam
/// update. Stops at the iteration cap or after the cost delta stays under
/// the tolerance for 3 consecutive iterations. Bit-reproducible per seed.
inline TrainResult train(
    const TrainConfig& config, const TrainData& data,
    const std::filesystem::path& checkpoint_dir = {},
    const std::function<void(const MetricsRow&)>& progress = {}) {
  detail::validate_train_inputs(config, data);
  const int num_classes = static_cast<int>(config.class_labels.size());
  const std::size_t padded_dim = data.train_per_class.front().empty()
                                     ? 0
                                     : data.train_per_class.front().front().features.size();
  if (padded_dim == 0) {
    throw DataError("training data is empty");
  }
  const CircuitShape shape = CircuitShape::for_classes(
      num_classes, config.repetitions, static_cast<int>(padded_dim / 3));

  Rng master(config.seed);
  ParameterTensor weights = ParameterTensor::random_init(shape, master);
  const Batch batch =
      make_batches(data.train_per_class, config.train_per_class, master.raw());

  std::vector<EncodedSample> train_eval;
  for (const SampleTuple& tuple : batch) {
    train_eval.insert(train_eval.end(), tuple.begin(), tuple.end());
  }

  AdamState adam_state(shape, config.adam);
  TrainResult result;
  result.shape = shape;

  const auto start = std::chrono::steady_clock::now();
  double previous_cost = 0.0;
  int quiet_streak = 0;
  for (int iteration = 1; iteration <= config.max_iterations; ++iteration) {
    double current_cost = 0.0;
    try {
      current_cost = cost(shape, batch, weights);
    } catch (const NumericError& e) {
      throw NumericError(std::string(e.what()) + " at iteration " +
                         std::to_string(iteration));
    }

    MetricsRow row;
    row.iteration = iteration;
    row.cost = current_cost;
    row.train_accuracy = evaluate_accuracy(shape, weights, train_eval);
    row.test_accuracy =
        data.test.empty() ? 0.0 : evaluate_accuracy(shape, weights, data.test);
    row.elapsed_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    result.metrics.push_back(row);
    if (progress) {
      progress(row);
    }

    if (!checkpoint_dir.empty()) {
      Checkpoint checkpoint;
      checkpoint.shape = shape;
      checkpoint.class_labels = config.class_labels;
      checkpoint.seed = config.seed;
      checkpoint.iteration = iteration;
      checkpoint.weights = weights;
      checkpoint.adam_first_moment = adam_state.first_moment;
      checkpoint.adam_second_moment = adam_state.second_moment;
      checkpoint.adam_step_count = adam_state.step_count;
      save_checkpoint(checkpoint_dir / checkpoint_filename(iteration),
                      checkpoint);
    }

    if (iteration >= 2 &&
        std::abs(current_cost - previous_cost) < config.tolerance) {
      ++quiet_streak;
    } else {
      quiet_streak = 0;
    }
    previous_cost = current_cost;
    if (quiet_streak >= 3) {
      result.converged = true;
      break;
    }

    if (iteration < config.max_iterations) {
      const ParameterTensor grad =
          grad_fd(shape, batch, weights, config.grad_eps);
      adam_step(weights, grad, adam_state);
    }
  }
  result.weights = std::move(weights);
  return result;
}

}  // namespace qmcc
