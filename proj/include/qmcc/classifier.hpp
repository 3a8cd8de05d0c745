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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qmcc/circuit.hpp"
#include "qmcc/error.hpp"
#include "qmcc/parallel.hpp"
#include "qmcc/rng.hpp"
#include "qmcc/statevector.hpp"

namespace qmcc {

/// Runs unclassified features through every class block with the trained
/// weights and returns the exact sample-register readout distribution over
/// all 2^t outcomes.
inline std::vector<double> predict_probs(const CircuitShape& shape,
                                         const ParameterTensor& weights,
                                         std::span<const double> features) {
  if (features.size() != shape.padded_dim()) {
    throw ShapeError("expected " + std::to_string(shape.padded_dim()) +
                     " features, got " + std::to_string(features.size()));
  }
  StateVector sv = initial_state(shape);
  for (int rep = 0; rep < shape.repetitions; ++rep) {
    for (int i = 0; i < shape.num_classes; ++i) {
      apply_class_block(sv, shape, i, features, weights, rep);
    }
  }
  std::vector<std::size_t> sample_qubits;
  for (int q = 0; q < shape.register_width; ++q) {
    sample_qubits.push_back(static_cast<std::size_t>(q));
  }
  return sv.marginal_probs(sample_qubits);
}

/// Argmax decoding over the class window of the outcome distribution. When
/// the classes do not fill the register, outcome 0 is a padding artifact, so
/// the window is outcomes 1..L and the winner shifts down by one. Ties break
/// toward the smaller class id.
inline int decode_outcome(const CircuitShape& shape,
                          std::span<const double> probs) {
  const int offset = shape.label_offset();
  int best = 0;
  for (int cls = 1; cls < shape.num_classes; ++cls) {
    if (probs[static_cast<std::size_t>(cls + offset)] >
        probs[static_cast<std::size_t>(best + offset)]) {
      best = cls;
    }
  }
  return best;
}

inline int classify(const CircuitShape& shape, const ParameterTensor& weights,
                    std::span<const double> features) {
  const std::vector<double> probs = predict_probs(shape, weights, features);
  return decode_outcome(shape, probs);
}

/// Shot-sampled variant of classify: decodes seeded measurement counts
/// instead of exact probabilities.
inline int classify_sampled(const CircuitShape& shape,
                            const ParameterTensor& weights,
                            std::span<const double> features,
                            std::uint64_t shots, std::uint64_t seed) {
  if (shots == 0) {
    throw NumericError("shot count must be positive");
  }
  if (features.size() != shape.padded_dim()) {
    throw ShapeError("expected " + std::to_string(shape.padded_dim()) +
                     " features, got " + std::to_string(features.size()));
  }
  StateVector sv = initial_state(shape);
  for (int rep = 0; rep < shape.repetitions; ++rep) {
    for (int i = 0; i < shape.num_classes; ++i) {
      apply_class_block(sv, shape, i, features, weights, rep);
    }
  }
  std::vector<std::size_t> sample_qubits;
  for (int q = 0; q < shape.register_width; ++q) {
    sample_qubits.push_back(static_cast<std::size_t>(q));
  }
  Rng rng(seed);
  const auto counts = sv.sample_marginal(sample_qubits, shots, rng);
  std::vector<double> probs(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    probs[i] = static_cast<double>(counts[i]) / static_cast<double>(shots);
  }
  return decode_outcome(shape, probs);
}

/// Fraction of samples whose decoded class matches their label.
inline double evaluate_accuracy(const CircuitShape& shape,
                                const ParameterTensor& weights,
                                std::span<const EncodedSample> samples) {
  if (samples.empty()) {
    throw DataError("cannot evaluate accuracy on an empty sample set");
  }
  std::vector<int> predicted(samples.size());
  detail::parallel_for(samples.size(), [&](std::size_t i) {
    predicted[i] = classify(shape, weights, samples[i].features);
  });
  std::size_t correct = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (predicted[i] == samples[i].label) {
      ++correct;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(samples.size());
}

}  // namespace qmcc
