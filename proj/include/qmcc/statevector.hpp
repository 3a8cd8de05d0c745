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
#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "qmcc/error.hpp"
#include "qmcc/rng.hpp"

namespace qmcc {

using Complex = std::complex<double>;

/// 2x2 complex matrix acting on one qubit.
struct SingleQubitUnitary {
  Complex u00{1.0}, u01{0.0};
  Complex u10{0.0}, u11{1.0};

  SingleQubitUnitary dagger() const {
    return {std::conj(u00), std::conj(u10), std::conj(u01), std::conj(u11)};
  }

  /// Matrix product; rhs acts first.
  SingleQubitUnitary operator*(const SingleQubitUnitary& rhs) const {
    return {u00 * rhs.u00 + u01 * rhs.u10, u00 * rhs.u01 + u01 * rhs.u11,
            u10 * rhs.u00 + u11 * rhs.u10, u10 * rhs.u01 + u11 * rhs.u11};
  }

  /// U†U == I entrywise within tol.
  bool is_unitary(double tol = 1e-12) const {
    const Complex a = std::conj(u00) * u00 + std::conj(u10) * u10;
    const Complex b = std::conj(u00) * u01 + std::conj(u10) * u11;
    const Complex c = std::conj(u01) * u00 + std::conj(u11) * u10;
    const Complex d = std::conj(u01) * u01 + std::conj(u11) * u11;
    return std::abs(a - 1.0) <= tol && std::abs(b) <= tol &&
           std::abs(c) <= tol && std::abs(d - 1.0) <= tol;
  }

  static SingleQubitUnitary identity() { return {}; }

  static SingleQubitUnitary pauli_x() {
    return {Complex{0.0}, Complex{1.0}, Complex{1.0}, Complex{0.0}};
  }

  static SingleQubitUnitary hadamard() {
    const double s = std::sqrt(0.5);
    return {Complex{s}, Complex{s}, Complex{s}, Complex{-s}};
  }
};

/// Basis-state condition for controlled gates: each listed qubit must read
/// the required bit. An empty control list means "always".
class BasisControl {
 public:
  BasisControl() = default;

  BasisControl(std::initializer_list<std::pair<std::size_t, int>> bits) {
    for (const auto& [qubit, bit] : bits) {
      add(qubit, bit);
    }
  }

  void add(std::size_t qubit, int bit) {
    if (qubit >= 64) {
      throw IndexError("control qubit " + std::to_string(qubit) +
                       " exceeds the 64-bit basis index");
    }
    if (bit != 0 && bit != 1) {
      throw IndexError("control bit must be 0 or 1");
    }
    const std::uint64_t q = std::uint64_t{1} << qubit;
    if (mask_ & q) {
      throw IndexError("duplicate control on qubit " + std::to_string(qubit));
    }
    mask_ |= q;
    if (bit == 1) {
      value_ |= q;
    }
  }

  /// Controls requiring `count` qubits starting at `first` to read the bit
  /// pattern of `value` (bit p of value on qubit first + p).
  static BasisControl register_value(std::size_t first, std::size_t count,
                                     std::uint64_t value) {
    BasisControl controls;
    for (std::size_t p = 0; p < count; ++p) {
      controls.add(first + p, static_cast<int>((value >> p) & 1));
    }
    return controls;
  }

  bool empty() const { return mask_ == 0; }
  std::uint64_t mask() const { return mask_; }
  std::uint64_t value() const { return value_; }

 private:
  std::uint64_t mask_ = 0;
  std::uint64_t value_ = 0;
};

/// Dense complex amplitude vector over 2^num_qubits basis states.
///
/// Bit convention: basis index b stores qubit q as bit q of b, so qubit 0 is
/// the least significant bit. Gates mutate the vector in place; copies are
/// cheap enough for the register sizes used here.
class StateVector {
 public:
  static constexpr std::size_t kMaxQubits = 24;

  /// |0...0> on num_qubits qubits.
  static StateVector zero(std::size_t num_qubits) {
    StateVector sv(num_qubits);
    sv.amps_[0] = Complex{1.0};
    return sv;
  }

  /// Computational basis state |index>.
  static StateVector basis(std::size_t num_qubits, std::uint64_t index) {
    StateVector sv(num_qubits);
    if (index >= sv.dim()) {
      throw IndexError("basis index " + std::to_string(index) +
                       " out of range for " + std::to_string(num_qubits) +
                       " qubits");
    }
    sv.amps_[index] = Complex{1.0};
    return sv;
  }

  std::size_t num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return amps_.size(); }
  std::span<const Complex> amplitudes() const { return amps_; }

  Complex amplitude(std::size_t basis_index) const {
    if (basis_index >= amps_.size()) {
      throw IndexError("basis index out of range");
    }
    return amps_[basis_index];
  }

  double norm() const {
    double sum = 0.0;
    for (const Complex& a : amps_) {
      sum += std::norm(a);
    }
    return std::sqrt(sum);
  }

  /// Applies u to `qubit`, identity elsewhere.
  void apply_single(std::size_t qubit, const SingleQubitUnitary& u) {
    check_qubit(qubit);
    const std::size_t step = std::size_t{1} << qubit;
    for (std::size_t base = 0; base < amps_.size(); base += 2 * step) {
      for (std::size_t offset = 0; offset < step; ++offset) {
        const std::size_t i0 = base + offset;
        const std::size_t i1 = i0 + step;
        const Complex a0 = amps_[i0];
        const Complex a1 = amps_[i1];
        amps_[i0] = u.u00 * a0 + u.u01 * a1;
        amps_[i1] = u.u10 * a0 + u.u11 * a1;
      }
    }
  }

  /// Applies u to `qubit` on the amplitudes whose control bits all match;
  /// every other amplitude is untouched. Empty controls equal apply_single.
  void apply_controlled(const BasisControl& controls, std::size_t qubit,
                        const SingleQubitUnitary& u) {
    check_qubit(qubit);
    const std::uint64_t cmask = controls.mask();
    const std::uint64_t cval = controls.value();
    if (cmask >> num_qubits_) {
      throw IndexError("control qubit out of range");
    }
    const std::uint64_t tbit = std::uint64_t{1} << qubit;
    if (cmask & tbit) {
      throw IndexError("target qubit " + std::to_string(qubit) +
                       " is also a control");
    }
    const std::size_t step = std::size_t{1} << qubit;
    for (std::size_t base = 0; base < amps_.size(); base += 2 * step) {
      for (std::size_t offset = 0; offset < step; ++offset) {
        const std::size_t i0 = base + offset;
        if ((i0 & cmask) != cval) {
          continue;
        }
        const std::size_t i1 = i0 + step;
        const Complex a0 = amps_[i0];
        const Complex a1 = amps_[i1];
        amps_[i0] = u.u00 * a0 + u.u01 * a1;
        amps_[i1] = u.u10 * a0 + u.u11 * a1;
      }
    }
  }

  /// <this|other> = sum conj(this_i) * other_i.
  Complex inner_product(const StateVector& other) const {
    if (num_qubits_ != other.num_qubits_) {
      throw ShapeError("inner product between " + std::to_string(num_qubits_) +
                       "- and " + std::to_string(other.num_qubits_) +
                       "-qubit states");
    }
    Complex sum{0.0};
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      sum += std::conj(amps_[i]) * other.amps_[i];
    }
    return sum;
  }

  /// Probability of each readout pattern of the listed qubits. Outcome j has
  /// bit p equal to the readout of qubits[p].
  std::vector<double> marginal_probs(
      std::span<const std::size_t> qubits) const {
    std::uint64_t seen = 0;
    for (const std::size_t q : qubits) {
      check_qubit(q);
      const std::uint64_t bit = std::uint64_t{1} << q;
      if (seen & bit) {
        throw IndexError("duplicate qubit " + std::to_string(q) +
                         " in marginal");
      }
      seen |= bit;
    }
    std::vector<double> probs(std::size_t{1} << qubits.size(), 0.0);
    for (std::size_t i = 0; i < amps_.size(); ++i) {
      std::size_t outcome = 0;
      for (std::size_t p = 0; p < qubits.size(); ++p) {
        outcome |= ((i >> qubits[p]) & 1) << p;
      }
      probs[outcome] += std::norm(amps_[i]);
    }
    return probs;
  }

  /// Shot-sampled readout counts for the listed qubits, seeded through rng.
  std::vector<std::uint64_t> sample_marginal(std::span<const std::size_t> qubits,
                                             std::uint64_t shots,
                                             Rng& rng) const {
    const std::vector<double> probs = marginal_probs(qubits);
    std::vector<double> cdf(probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      acc += probs[i];
      cdf[i] = acc;
    }
    std::vector<std::uint64_t> counts(probs.size(), 0);
    for (std::uint64_t s = 0; s < shots; ++s) {
      const double r = rng.uniform();
      std::size_t lo = 0;
      std::size_t hi = cdf.size() - 1;
      while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (r < cdf[mid]) {
          hi = mid;
        } else {
          lo = mid + 1;
        }
      }
      ++counts[lo];
    }
    return counts;
  }

 private:
  explicit StateVector(std::size_t num_qubits)
      : num_qubits_(num_qubits),
        amps_(allocate_checked(num_qubits), Complex{0.0}) {}

  static std::size_t allocate_checked(std::size_t num_qubits) {
    if (num_qubits < 1 || num_qubits > kMaxQubits) {
      throw SizeError("num_qubits must be in [1, " +
                      std::to_string(kMaxQubits) + "], got " +
                      std::to_string(num_qubits));
    }
    return std::size_t{1} << num_qubits;
  }

  void check_qubit(std::size_t qubit) const {
    if (qubit >= num_qubits_) {
      throw IndexError("qubit " + std::to_string(qubit) +
                       " out of range for " + std::to_string(num_qubits_) +
                       "-qubit state");
    }
  }

  std::size_t num_qubits_;
  std::vector<Complex> amps_;
};

}  // namespace qmcc
