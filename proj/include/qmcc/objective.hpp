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

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "qmcc/circuit.hpp"
#include "qmcc/error.hpp"
#include "qmcc/parallel.hpp"
#include "qmcc/statevector.hpp"

namespace qmcc {

/// One circuit evaluation's worth of data: one sample per class, position i
/// labeled i.
using SampleTuple = std::vector<EncodedSample>;

/// Training batch of M tuples.
using Batch = std::vector<SampleTuple>;

/// Fidelity cost: the squared overlap between each tuple's final state and
/// the entangled target, averaged over the batch and subtracted from one.
/// Overlaps are exact, never shot-sampled, and summed in tuple order.
inline double cost(const CircuitShape& shape, const Batch& batch,
                   const ParameterTensor& params) {
  if (batch.empty()) {
    throw ShapeError("cost of an empty batch");
  }
  const StateVector target = optimal_state(shape.register_width);
  double sum = 0.0;
  for (const SampleTuple& tuple : batch) {
    const StateVector final_state = build_final_state(shape, tuple, params);
    const Complex overlap = target.inner_product(final_state);
    sum += 1.0 - std::norm(overlap);
  }
  const double value = sum / static_cast<double>(batch.size());
  if (!std::isfinite(value)) {
    throw NumericError("cost is not finite");
  }
  return value;
}

/// Central-difference gradient of cost, one coordinate at a time:
/// (cost(W + eps e) - cost(W - eps e)) / (2 eps). Coordinates are evaluated
/// independently (and possibly in parallel), so the result is deterministic
/// for a fixed batch.
///
/// A coordinate perturbs a single (class, rep, qubit) loading operator, so
/// the unperturbed operators are built once and reused; the perturbed
/// evaluation applies the same gates in the same order as cost() and is
/// bit-identical to the naive two-sided difference.
inline ParameterTensor grad_fd(const CircuitShape& shape, const Batch& batch,
                               const ParameterTensor& params,
                               double eps = 1e-4) {
  if (!(eps > 0.0) || !std::isfinite(eps)) {
    throw NumericError("finite-difference eps must be positive");
  }
  ParameterTensor grad(shape);
  if (!grad.same_shape(params)) {
    throw ShapeError("parameter tensor does not match the circuit shape");
  }
  if (batch.empty()) {
    throw ShapeError("gradient of an empty batch");
  }

  const int num_classes = shape.num_classes;
  const int reps = shape.repetitions;
  const int t = shape.register_width;
  const std::size_t tuples = batch.size();
  const std::size_t slice_len = shape.padded_dim();

  // Validate tuples once; the cached path below bypasses build_final_state.
  for (const SampleTuple& tuple : batch) {
    if (tuple.size() != static_cast<std::size_t>(num_classes)) {
      throw ShapeError("expected one sample per class (" +
                       std::to_string(num_classes) + "), got " +
                       std::to_string(tuple.size()));
    }
    for (std::size_t i = 0; i < tuple.size(); ++i) {
      if (tuple[i].label != static_cast<int>(i)) {
        throw ShapeError("tuple position " + std::to_string(i) +
                         " holds label " + std::to_string(tuple[i].label));
      }
      if (tuple[i].features.size() != slice_len) {
        throw ShapeError("expected " + std::to_string(slice_len) +
                         " features, got " +
                         std::to_string(tuple[i].features.size()));
      }
    }
  }

  const StateVector target = optimal_state(t);
  const StateVector init = initial_state(shape);
  std::vector<BasisControl> controls;
  for (int i = 0; i < num_classes; ++i) {
    controls.push_back(BasisControl::register_value(
        static_cast<std::size_t>(t), static_cast<std::size_t>(t),
        static_cast<std::uint64_t>(i + shape.label_offset())));
  }

  // Unperturbed loading operators, indexed ((tuple * L + class) * m + rep) * t + qubit.
  std::vector<SingleQubitUnitary> cache(tuples * num_classes * reps * t);
  for (std::size_t r = 0; r < tuples; ++r) {
    for (int i = 0; i < num_classes; ++i) {
      for (int rep = 0; rep < reps; ++rep) {
        for (int j = 0; j < t; ++j) {
          cache[((r * num_classes + i) * reps + rep) * t + j] = build_v(
              batch[r][static_cast<std::size_t>(i)].features,
              params.qubit_slice(i, rep, j));
        }
      }
    }
  }

  const std::size_t per_qubit = slice_len;  // 3K weights per loading operator
  std::span<double> out = grad.raw();
  detail::parallel_for(params.size(), [&](std::size_t c) {
    const int cls = static_cast<int>(c / (per_qubit * t * reps));
    const int rep = static_cast<int>(c / (per_qubit * t) % reps);
    const int qubit = static_cast<int>(c / per_qubit % t);
    const std::size_t within = c % per_qubit;

    std::vector<double> slice(params.qubit_slice(cls, rep, qubit).begin(),
                              params.qubit_slice(cls, rep, qubit).end());
    const double original = slice[within];

    const auto shifted_cost = [&](double value) {
      slice[within] = value;
      double sum = 0.0;
      for (std::size_t r = 0; r < tuples; ++r) {
        const SingleQubitUnitary v_sub =
            build_v(batch[r][static_cast<std::size_t>(cls)].features, slice);
        StateVector sv = init;
        for (int rep2 = 0; rep2 < reps; ++rep2) {
          for (int i = 0; i < num_classes; ++i) {
            for (int j = 0; j < t; ++j) {
              const SingleQubitUnitary& v =
                  (i == cls && rep2 == rep && j == qubit)
                      ? v_sub
                      : cache[((r * num_classes + i) * reps + rep2) * t + j];
              sv.apply_controlled(controls[static_cast<std::size_t>(i)],
                                  static_cast<std::size_t>(j), v);
            }
          }
        }
        sum += 1.0 - std::norm(target.inner_product(sv));
      }
      const double value_mean = sum / static_cast<double>(tuples);
      if (!std::isfinite(value_mean)) {
        throw NumericError("cost is not finite");
      }
      return value_mean;
    };

    const double up = shifted_cost(original + eps);
    const double down = shifted_cost(original - eps);
    out[c] = (up - down) / (2.0 * eps);
  });
  return grad;
}

struct AdamParams {
  double step_size = 0.05;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam accumulators, shaped like the weights they update.
struct AdamState {
  ParameterTensor first_moment;
  ParameterTensor second_moment;
  long step_count = 0;
  AdamParams params;

  AdamState() = default;
  explicit AdamState(const CircuitShape& shape, AdamParams hyper = {})
      : first_moment(shape), second_moment(shape), params(hyper) {}
};

/// Standard bias-corrected Adam update, in place.
inline void adam_step(ParameterTensor& weights, const ParameterTensor& grad,
                      AdamState& state) {
  if (!weights.same_shape(grad) || !weights.same_shape(state.first_moment) ||
      !weights.same_shape(state.second_moment)) {
    throw ShapeError("adam update across mismatched tensors");
  }
  state.step_count += 1;
  const AdamParams& p = state.params;
  const double bias1 = 1.0 - std::pow(p.beta1, state.step_count);
  const double bias2 = 1.0 - std::pow(p.beta2, state.step_count);
  std::span<double> w = weights.raw();
  std::span<const double> g = grad.raw();
  std::span<double> m = state.first_moment.raw();
  std::span<double> v = state.second_moment.raw();
  for (std::size_t i = 0; i < w.size(); ++i) {
    m[i] = p.beta1 * m[i] + (1.0 - p.beta1) * g[i];
    v[i] = p.beta2 * v[i] + (1.0 - p.beta2) * g[i] * g[i];
    const double m_hat = m[i] / bias1;
    const double v_hat = v[i] / bias2;
    w[i] -= p.step_size * m_hat / (std::sqrt(v_hat) + p.epsilon);
  }
}

}  // namespace qmcc
