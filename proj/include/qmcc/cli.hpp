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

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qmcc/classifier.hpp"
#include "qmcc/complexity.hpp"
#include "qmcc/dataset.hpp"
#include "qmcc/error.hpp"
#include "qmcc/trainer.hpp"

namespace qmcc::cli {

/// A parsed training run description: the trainer configuration plus the
/// feature files it reads.
struct TrainFileConfig {
  TrainConfig config;
  std::filesystem::path train_features;
  std::filesystem::path test_features;
};

namespace detail {

inline std::string trim(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r");
  if (begin == std::string::npos) {
    return {};
  }
  const auto end = text.find_last_not_of(" \t\r");
  return text.substr(begin, end - begin + 1);
}

inline double parse_double_value(const std::string& value,
                                 const std::string& key, std::size_t line) {
  if (value == "inf") {
    return std::numeric_limits<double>::infinity();
  }
  double parsed = 0.0;
  const auto result =
      std::from_chars(value.data(), value.data() + value.size(), parsed);
  if (result.ec != std::errc{} || result.ptr != value.data() + value.size()) {
    throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                      "' needs a number, got '" + value + "'");
  }
  return parsed;
}

inline long long parse_int_value(const std::string& value,
                                 const std::string& key, std::size_t line) {
  long long parsed = 0;
  const auto result =
      std::from_chars(value.data(), value.data() + value.size(), parsed);
  if (result.ec != std::errc{} || result.ptr != value.data() + value.size()) {
    throw ConfigError("line " + std::to_string(line) + ": key '" + key +
                      "' needs an integer, got '" + value + "'");
  }
  return parsed;
}

inline std::vector<int> parse_class_list(const std::string& value,
                                         std::size_t line) {
  std::vector<int> classes;
  std::stringstream stream(value);
  std::string item;
  while (std::getline(stream, item, ',')) {
    const std::string token = trim(item);
    if (token.empty()) {
      throw ConfigError("line " + std::to_string(line) +
                        ": empty entry in class list");
    }
    classes.push_back(
        static_cast<int>(parse_int_value(token, "classes", line)));
  }
  if (classes.empty()) {
    throw ConfigError("line " + std::to_string(line) + ": empty class list");
  }
  return classes;
}

}  // namespace detail

/// Parses the line-oriented `key = value` training configuration. Blank
/// lines and lines starting with '#' are skipped; unknown keys are errors.
/// Relative feature paths resolve against the config file's directory.
inline TrainFileConfig parse_train_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config " + path.string());
  }
  TrainFileConfig parsed;
  std::vector<std::string> seen;
  std::string line;
  std::size_t line_number = 0;
  bool have_classes = false, have_train = false, have_iterations = false;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string text = detail::trim(line);
    if (text.empty() || text[0] == '#') {
      continue;
    }
    const auto equals = text.find('=');
    if (equals == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_number) +
                        ": expected 'key = value'");
    }
    const std::string key = detail::trim(text.substr(0, equals));
    const std::string value = detail::trim(text.substr(equals + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("line " + std::to_string(line_number) +
                        ": expected 'key = value'");
    }
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
      throw ConfigError("line " + std::to_string(line_number) +
                        ": duplicate key '" + key + "'");
    }
    seen.push_back(key);

    if (key == "classes") {
      parsed.config.class_labels = detail::parse_class_list(value, line_number);
      have_classes = true;
    } else if (key == "train_per_class") {
      parsed.config.train_per_class = static_cast<int>(
          detail::parse_int_value(value, key, line_number));
      have_train = true;
    } else if (key == "repetitions") {
      parsed.config.repetitions =
          static_cast<int>(detail::parse_int_value(value, key, line_number));
    } else if (key == "iterations") {
      parsed.config.max_iterations =
          static_cast<int>(detail::parse_int_value(value, key, line_number));
      have_iterations = true;
    } else if (key == "tolerance") {
      parsed.config.tolerance =
          detail::parse_double_value(value, key, line_number);
    } else if (key == "seed") {
      parsed.config.seed = static_cast<std::uint64_t>(
          detail::parse_int_value(value, key, line_number));
    } else if (key == "grad_eps") {
      parsed.config.grad_eps =
          detail::parse_double_value(value, key, line_number);
    } else if (key == "adam_step_size") {
      parsed.config.adam.step_size =
          detail::parse_double_value(value, key, line_number);
    } else if (key == "adam_beta1") {
      parsed.config.adam.beta1 =
          detail::parse_double_value(value, key, line_number);
    } else if (key == "adam_beta2") {
      parsed.config.adam.beta2 =
          detail::parse_double_value(value, key, line_number);
    } else if (key == "adam_epsilon") {
      parsed.config.adam.epsilon =
          detail::parse_double_value(value, key, line_number);
    } else if (key == "train_features") {
      parsed.train_features = value;
    } else if (key == "test_features") {
      parsed.test_features = value;
    } else {
      throw ConfigError("line " + std::to_string(line_number) +
                        ": unknown key '" + key + "'");
    }
  }
  if (!have_classes || !have_train || !have_iterations) {
    throw ConfigError(
        "config needs at least: classes, train_per_class, iterations");
  }
  if (parsed.train_features.empty() || parsed.test_features.empty()) {
    throw ConfigError("config needs train_features and test_features paths");
  }
  const std::filesystem::path base = path.parent_path();
  if (parsed.train_features.is_relative()) {
    parsed.train_features = base / parsed.train_features;
  }
  if (parsed.test_features.is_relative()) {
    parsed.test_features = base / parsed.test_features;
  }
  return parsed;
}

namespace detail {

inline int class_id_for(const std::vector<int>& class_labels, int label) {
  for (std::size_t i = 0; i < class_labels.size(); ++i) {
    if (class_labels[i] == label) {
      return static_cast<int>(i);
    }
  }
  return -1;
}

/// Rows whose label is listed become padded samples; other rows are skipped.
inline std::vector<EncodedSample> encode_rows(
    const std::vector<FeatureRow>& rows, const std::vector<int>& class_labels) {
  std::vector<EncodedSample> samples;
  for (const FeatureRow& row : rows) {
    const int id = class_id_for(class_labels, row.label);
    if (id < 0) {
      continue;
    }
    samples.push_back({pad_features(row.features), id});
  }
  return samples;
}

}  // namespace detail

/// Accuracy and per-class confusion counts of a checkpoint on a feature
/// file. Test path may be a directory holding test.csv.
struct EvalSummary {
  std::filesystem::path checkpoint;
  int iteration = 0;
  std::vector<int> class_labels;
  std::size_t sample_count = 0;
  double accuracy = 0.0;
  std::vector<std::vector<long long>> confusion;  ///< [true class][predicted]

  std::string to_text() const {
    std::ostringstream out;
    out << "checkpoint: " << checkpoint.string() << " (iteration "
        << iteration << ")\n";
    out << "samples: " << sample_count << "\n";
    out << "accuracy: " << format_double(accuracy) << "\n";
    out << "confusion (rows: true label, cols: predicted label)\n";
    out << std::setw(8) << ' ';
    for (const int label : class_labels) {
      out << std::setw(8) << label;
    }
    out << "\n";
    for (std::size_t row = 0; row < confusion.size(); ++row) {
      out << std::setw(8) << class_labels[row];
      for (const long long count : confusion[row]) {
        out << std::setw(8) << count;
      }
      out << "\n";
    }
    return out.str();
  }
};

inline EvalSummary evaluate_checkpoint(
    const std::filesystem::path& checkpoint_path,
    std::filesystem::path test_path) {
  const Checkpoint checkpoint = load_checkpoint(checkpoint_path);
  if (std::filesystem::is_directory(test_path)) {
    test_path /= "test.csv";
  }
  const std::vector<FeatureRow> rows = read_feature_csv(test_path);
  const std::vector<EncodedSample> samples =
      detail::encode_rows(rows, checkpoint.class_labels);
  if (samples.empty()) {
    throw DataError("no rows in " + test_path.string() +
                    " match the checkpoint's classes");
  }
  const std::size_t num_classes = checkpoint.class_labels.size();

  EvalSummary summary;
  summary.checkpoint = checkpoint_path;
  summary.iteration = checkpoint.iteration;
  summary.class_labels = checkpoint.class_labels;
  summary.sample_count = samples.size();
  summary.confusion.assign(num_classes,
                           std::vector<long long>(num_classes, 0));

  std::vector<int> predicted(samples.size());
  qmcc::detail::parallel_for(samples.size(), [&](std::size_t i) {
    predicted[i] =
        classify(checkpoint.shape, checkpoint.weights, samples[i].features);
  });
  std::size_t correct = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    summary.confusion[static_cast<std::size_t>(samples[i].label)]
                     [static_cast<std::size_t>(predicted[i])] += 1;
    if (predicted[i] == samples[i].label) {
      ++correct;
    }
  }
  summary.accuracy =
      static_cast<double>(correct) / static_cast<double>(samples.size());
  return summary;
}

namespace detail {

inline int run_ingest(const std::filesystem::path& images_path,
                      const std::filesystem::path& labels_path,
                      const std::vector<int>& classes, int train_count,
                      int test_count, std::uint64_t seed,
                      const std::filesystem::path& out_dir) {
  const std::vector<Image> images =
      parse_idx_images(read_bytes_auto(images_path));
  const std::vector<std::uint8_t> labels =
      parse_idx_labels(read_bytes_auto(labels_path));
  if (images.size() != labels.size()) {
    throw DataError("image count " + std::to_string(images.size()) +
                    " does not match label count " +
                    std::to_string(labels.size()));
  }
  const SelectedSubsets subsets =
      select_subset(labels, classes, train_count, test_count, seed);

  const auto to_rows = [&](const std::vector<std::vector<std::size_t>>& lists) {
    std::vector<FeatureRow> rows;
    for (std::size_t cls = 0; cls < lists.size(); ++cls) {
      for (const std::size_t index : lists[cls]) {
        rows.push_back({classes[cls], rough_grid_features(images[index])});
      }
    }
    return rows;
  };

  std::filesystem::create_directories(out_dir);
  const std::vector<FeatureRow> train_rows = to_rows(subsets.train);
  write_feature_csv(out_dir / "train.csv", train_rows);
  std::cout << "wrote " << train_rows.size() << " train rows to "
            << (out_dir / "train.csv").string() << "\n";
  if (test_count > 0) {
    const std::vector<FeatureRow> test_rows = to_rows(subsets.test);
    write_feature_csv(out_dir / "test.csv", test_rows);
    std::cout << "wrote " << test_rows.size() << " test rows to "
              << (out_dir / "test.csv").string() << "\n";
  }
  return 0;
}

inline int run_train(const std::filesystem::path& config_path,
                     const std::filesystem::path& out_dir) {
  const TrainFileConfig parsed = parse_train_config(config_path);

  TrainData data;
  const std::vector<FeatureRow> train_rows =
      read_feature_csv(parsed.train_features);
  data.train_per_class.assign(parsed.config.class_labels.size(), {});
  for (const EncodedSample& sample :
       encode_rows(train_rows, parsed.config.class_labels)) {
    data.train_per_class[static_cast<std::size_t>(sample.label)].push_back(
        sample);
  }
  const std::vector<FeatureRow> test_rows =
      read_feature_csv(parsed.test_features);
  data.test = encode_rows(test_rows, parsed.config.class_labels);

  std::filesystem::create_directories(out_dir);
  const TrainResult result =
      train(parsed.config, data, out_dir, [](const MetricsRow& row) {
        std::cout << "iter " << row.iteration << ": cost "
                  << format_double(row.cost) << ", train_acc "
                  << format_double(row.train_accuracy) << ", test_acc "
                  << format_double(row.test_accuracy) << "\n";
      });
  write_metrics_csv(out_dir / "metrics.csv", result.metrics);

  const MetricsRow& last = result.metrics.back();
  std::cout << (result.converged ? "converged" : "stopped at iteration cap")
            << " after " << last.iteration << " iterations, final cost "
            << format_double(last.cost) << ", test accuracy "
            << format_double(last.test_accuracy) << "\n";
  std::cout << "metrics written to " << (out_dir / "metrics.csv").string()
            << "\n";
  return 0;
}

}  // namespace detail

/// Command-line entry point; returns the process exit code.
inline int run(int argc, const char* const* argv) {
  CLI::App app{"hybrid quantum-classical multi-class classifier"};
  app.require_subcommand(1);

  // ingest
  auto* ingest = app.add_subcommand(
      "ingest", "extract grid features from IDX image/label files");
  std::string images_path, labels_path, out_dir;
  std::vector<int> classes;
  int train_count = 0, test_count = 0;
  std::uint64_t ingest_seed = 0;
  ingest->add_option("--images", images_path, "IDX image file (.gz accepted)")
      ->required();
  ingest->add_option("--labels", labels_path, "IDX label file (.gz accepted)")
      ->required();
  ingest->add_option("--classes", classes, "comma-separated digit labels")
      ->required()
      ->delimiter(',');
  ingest->add_option("--train", train_count, "training samples per class")
      ->required();
  ingest->add_option("--test", test_count, "test samples per class");
  ingest->add_option("--seed", ingest_seed, "selection seed");
  ingest->add_option("--out", out_dir, "output directory")->required();

  // train
  auto* train_cmd =
      app.add_subcommand("train", "run the hybrid optimization loop");
  std::string config_path, train_out;
  train_cmd->add_option("--config", config_path, "key = value config file")
      ->required();
  train_cmd->add_option("--out", train_out, "output directory")->required();

  // eval
  auto* eval_cmd =
      app.add_subcommand("eval", "evaluate a checkpoint on a feature file");
  std::string checkpoint_path, test_path;
  eval_cmd->add_option("--checkpoint", checkpoint_path, "checkpoint file")
      ->required();
  eval_cmd
      ->add_option("--test", test_path,
                   "feature csv or a directory holding test.csv")
      ->required();

  // audit
  auto* audit_cmd = app.add_subcommand(
      "audit", "decompose the circuit and compare gate counts");
  int audit_classes = 0, audit_k = 0, audit_m = 1;
  audit_cmd->add_option("--L", audit_classes, "class count")->required();
  audit_cmd->add_option("--k", audit_k, "rotations per loading operator")
      ->required();
  audit_cmd->add_option("--m", audit_m, "loading rounds per class");

  try {
    app.parse(argc, argv);
    if (ingest->parsed()) {
      return detail::run_ingest(images_path, labels_path, classes, train_count,
                                test_count, ingest_seed, out_dir);
    }
    if (train_cmd->parsed()) {
      return detail::run_train(config_path, train_out);
    }
    if (eval_cmd->parsed()) {
      std::cout << evaluate_checkpoint(checkpoint_path, test_path).to_text();
      return 0;
    }
    if (audit_cmd->parsed()) {
      const CircuitShape shape =
          CircuitShape::for_classes(audit_classes, audit_m, audit_k);
      std::cout << audit(shape, audit_k).to_text();
      return 0;
    }
    return 1;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace qmcc::cli
