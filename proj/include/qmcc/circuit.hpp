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
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "qmcc/encoding.hpp"
#include "qmcc/error.hpp"
#include "qmcc/rng.hpp"
#include "qmcc/statevector.hpp"

namespace qmcc {

/// Integer hyperparameters fixing the classifier circuit topology.
///
/// The circuit holds two registers of register_width qubits each: the sample
/// register on qubits [0, t) and the label register on qubits [t, 2t). Class i
/// loads its data on the label branch reading i + label_offset(): when the
/// class count is a power of two the classes fill all branches, otherwise
/// branch 0 is left unused so a zero readout identifies padding.
struct CircuitShape {
  int num_classes = 2;     ///< L
  int register_width = 1;  ///< t = ceil(log2(L))
  int repetitions = 1;     ///< m, data-loading rounds per class
  int encoding_units = 1;  ///< K, rotations per loading operator

  static constexpr int kMaxRegisterWidth = 8;

  /// Shape for an L-class task; derives the register width.
  static CircuitShape for_classes(int num_classes, int repetitions,
                                  int encoding_units) {
    CircuitShape shape;
    shape.num_classes = num_classes;
    shape.repetitions = repetitions;
    shape.encoding_units = encoding_units;
    shape.register_width = 0;
    while (num_classes > (1 << shape.register_width)) {
      ++shape.register_width;
    }
    shape.validate();
    return shape;
  }

  void validate() const {
    if (num_classes < 2) {
      throw ShapeError("need at least 2 classes");
    }
    if (repetitions < 1 || encoding_units < 1) {
      throw ShapeError("repetitions and encoding_units must be >= 1");
    }
    if (register_width < 1 || register_width > kMaxRegisterWidth) {
      throw ShapeError("register width out of range");
    }
    if ((1 << register_width) < num_classes ||
        (register_width > 1 && (1 << (register_width - 1)) >= num_classes)) {
      throw ShapeError("register width does not match the class count");
    }
    if (num_classes + label_offset() > (1 << register_width)) {
      throw ShapeError("classes do not fit the label register");
    }
  }

  bool classes_fill_register() const {
    return num_classes == (1 << register_width);
  }

  /// 0 when L is a power of two, else 1 (classes occupy branches 1..L).
  int label_offset() const { return classes_fill_register() ? 0 : 1; }

  int total_qubits() const { return 2 * register_width; }
  std::size_t padded_dim() const {
    return 3 * static_cast<std::size_t>(encoding_units);
  }
};

/// All trainable weights, indexed (class, repetition, qubit, unit, angle).
/// The flattened layout follows that index order, angle fastest.
class ParameterTensor {
 public:
  ParameterTensor() = default;

  explicit ParameterTensor(const CircuitShape& shape)
      : num_classes_(shape.num_classes),
        repetitions_(shape.repetitions),
        register_width_(shape.register_width),
        encoding_units_(shape.encoding_units),
        data_(static_cast<std::size_t>(num_classes_) * repetitions_ *
                  register_width_ * encoding_units_ * 3,
              0.0) {}

  static ParameterTensor zeros(const CircuitShape& shape) {
    return ParameterTensor(shape);
  }

  /// Seeded uniform(-pi, pi) initialization in flat index order.
  static ParameterTensor random_init(const CircuitShape& shape, Rng& rng) {
    ParameterTensor w(shape);
    for (double& value : w.data_) {
      value = rng.uniform(-std::numbers::pi, std::numbers::pi);
    }
    return w;
  }

  double& at(int cls, int rep, int qubit, int unit, int angle) {
    return data_[flat_index(cls, rep, qubit, unit, angle)];
  }

  double at(int cls, int rep, int qubit, int unit, int angle) const {
    return data_[flat_index(cls, rep, qubit, unit, angle)];
  }

  /// The 3K weights of one (class, repetition, qubit), unit-major: exactly
  /// the flat weight layout build_v consumes.
  std::span<const double> qubit_slice(int cls, int rep, int qubit) const {
    const std::size_t offset = flat_index(cls, rep, qubit, 0, 0);
    return {data_.data() + offset, static_cast<std::size_t>(encoding_units_) * 3};
  }

  std::span<double> raw() { return data_; }
  std::span<const double> raw() const { return data_; }
  std::size_t size() const { return data_.size(); }

  int num_classes() const { return num_classes_; }
  int repetitions() const { return repetitions_; }
  int register_width() const { return register_width_; }
  int encoding_units() const { return encoding_units_; }

  bool same_shape(const ParameterTensor& other) const {
    return num_classes_ == other.num_classes_ &&
           repetitions_ == other.repetitions_ &&
           register_width_ == other.register_width_ &&
           encoding_units_ == other.encoding_units_;
  }

 private:
  std::size_t flat_index(int cls, int rep, int qubit, int unit,
                         int angle) const {
    if (cls < 0 || cls >= num_classes_ || rep < 0 || rep >= repetitions_ ||
        qubit < 0 || qubit >= register_width_ || unit < 0 ||
        unit >= encoding_units_ || angle < 0 || angle >= 3) {
      throw IndexError("parameter index out of range");
    }
    return ((((static_cast<std::size_t>(cls) * repetitions_ + rep) *
                  register_width_ +
              qubit) *
                 encoding_units_ +
             unit) *
                3 +
            angle);
  }

  int num_classes_ = 0;
  int repetitions_ = 0;
  int register_width_ = 0;
  int encoding_units_ = 0;
  std::vector<double> data_;
};

/// Both registers |0...0>, then a Hadamard on every label qubit: the sample
/// register stays |0...0> against a uniform superposition of label branches.
inline StateVector initial_state(const CircuitShape& shape) {
  shape.validate();
  const int t = shape.register_width;
  StateVector sv = StateVector::zero(static_cast<std::size_t>(2) * t);
  for (int q = t; q < 2 * t; ++q) {
    sv.apply_single(static_cast<std::size_t>(q),
                    SingleQubitUnitary::hadamard());
  }
  return sv;
}

/// Applies one data-loading block for class_index: on every sample qubit j,
/// the loading operator built from the (class, rep) weight slice, controlled
/// on the label register reading the class's branch value. Other label
/// branches are untouched.
inline void apply_class_block(StateVector& sv, const CircuitShape& shape,
                              int class_index, std::span<const double> features,
                              const ParameterTensor& params, int rep) {
  if (class_index < 0 || class_index >= shape.num_classes) {
    throw IndexError("class index " + std::to_string(class_index) +
                     " out of range for " + std::to_string(shape.num_classes) +
                     " classes");
  }
  if (features.size() != shape.padded_dim()) {
    throw ShapeError("expected " + std::to_string(shape.padded_dim()) +
                     " features, got " + std::to_string(features.size()));
  }
  const int t = shape.register_width;
  const auto branch =
      static_cast<std::uint64_t>(class_index + shape.label_offset());
  const BasisControl controls = BasisControl::register_value(
      static_cast<std::size_t>(t), static_cast<std::size_t>(t), branch);
  for (int j = 0; j < t; ++j) {
    const SingleQubitUnitary v =
        build_v(features, params.qubit_slice(class_index, rep, j));
    sv.apply_controlled(controls, static_cast<std::size_t>(j), v);
  }
}

/// Full circuit run for one training tuple (one sample per class, tuple[i]
/// labeled i): the initial state followed by m rounds of class blocks in
/// ascending class order. Label branches without a class keep sample |0...0>.
inline StateVector build_final_state(const CircuitShape& shape,
                                     std::span<const EncodedSample> tuple,
                                     const ParameterTensor& params) {
  if (tuple.size() != static_cast<std::size_t>(shape.num_classes)) {
    throw ShapeError("expected one sample per class (" +
                     std::to_string(shape.num_classes) + "), got " +
                     std::to_string(tuple.size()));
  }
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    if (tuple[i].label != static_cast<int>(i)) {
      throw ShapeError("tuple position " + std::to_string(i) +
                       " holds label " + std::to_string(tuple[i].label));
    }
  }
  StateVector sv = initial_state(shape);
  for (int rep = 0; rep < shape.repetitions; ++rep) {
    for (int i = 0; i < shape.num_classes; ++i) {
      apply_class_block(sv, shape, i, tuple[static_cast<std::size_t>(i)].features,
                        params, rep);
    }
  }
  return sv;
}

/// Training target: the maximally entangled state with sample bits equal to
/// label bits, uniform over all 2^t branches.
inline StateVector optimal_state(int register_width) {
  if (register_width < 1 || register_width > CircuitShape::kMaxRegisterWidth) {
    throw SizeError("register width must be in [1, " +
                    std::to_string(CircuitShape::kMaxRegisterWidth) + "]");
  }
  const int t = register_width;
  StateVector sv = StateVector::zero(static_cast<std::size_t>(2) * t);
  for (int q = t; q < 2 * t; ++q) {
    sv.apply_single(static_cast<std::size_t>(q),
                    SingleQubitUnitary::hadamard());
  }
  // Entangle: copy each label bit onto its sample partner.
  for (int q = 0; q < t; ++q) {
    sv.apply_controlled(BasisControl{{static_cast<std::size_t>(t + q), 1}},
                        static_cast<std::size_t>(q),
                        SingleQubitUnitary::pauli_x());
  }
  return sv;
}

}  // namespace qmcc
