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
#include <cstdint>
#include <numeric>
#include <sstream>
#include <span>
#include <string>
#include <vector>

#include "qmcc/circuit.hpp"
#include "qmcc/encoding.hpp"
#include "qmcc/error.hpp"
#include "qmcc/rng.hpp"
#include "qmcc/statevector.hpp"

namespace qmcc {

/// Exact fraction; the closed-form gate count is not always integral.
struct Rational {
  long long num = 0;
  long long den = 1;

  Rational() = default;
  Rational(long long n, long long d = 1) : num(n), den(d) {
    if (den == 0) {
      throw NumericError("rational with zero denominator");
    }
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  Rational operator+(const Rational& rhs) const {
    return {num * rhs.den + rhs.num * den, den * rhs.den};
  }
  Rational operator-(const Rational& rhs) const {
    return {num * rhs.den - rhs.num * den, den * rhs.den};
  }
  Rational operator*(const Rational& rhs) const {
    return {num * rhs.num, den * rhs.den};
  }
  bool operator==(const Rational& rhs) const {
    return num == rhs.num && den == rhs.den;
  }

  bool is_integer() const { return den == 1; }
  double to_double() const {
    return static_cast<double>(num) / static_cast<double>(den);
  }
  std::string str() const {
    return is_integer() ? std::to_string(num)
                        : std::to_string(num) + "/" + std::to_string(den);
  }
};

/// Closed-form total gate count for register width t, k rotations per
/// loading operator and m loading rounds:
/// 2^t * t * (k*m + 5/2) + (13/4) * 2^t - 2t + 12.
inline Rational gate_count_formula(int t, long long k, long long m) {
  if (t < 1 || k < 1 || m < 1) {
    throw ShapeError("gate count formula needs t, k, m >= 1");
  }
  const long long pow2 = 1LL << t;
  return Rational(pow2 * t) * (Rational(k * m) + Rational(5, 2)) +
         Rational(13, 4) * Rational(pow2) + Rational(-2LL * t + 12);
}

/// Total qubits: two t-wide registers plus t-1 ladder ancillas.
inline int qubit_count(int t) {
  if (t < 1) {
    throw ShapeError("register width must be >= 1");
  }
  return 3 * t - 1;
}

/// One record of the decomposed circuit. Qubit layout: sample register
/// [0, t), label register [t, 2t), ancillas [2t, 3t-1).
struct Gate {
  enum class Kind { Hadamard, PauliX, Toffoli, ControlledU };

  Kind kind = Kind::Hadamard;
  int q0 = -1;  ///< H/X target; Toffoli first control; CU control
  int q1 = -1;  ///< Toffoli second control; CU target
  int q2 = -1;  ///< Toffoli target
  SingleQubitUnitary u;  ///< ControlledU payload

  static Gate hadamard(int q) { return {Kind::Hadamard, q, -1, -1, {}}; }
  static Gate pauli_x(int q) { return {Kind::PauliX, q, -1, -1, {}}; }
  static Gate toffoli(int c1, int c2, int target) {
    return {Kind::Toffoli, c1, c2, target, {}};
  }
  static Gate controlled_u(int control, int target,
                           const SingleQubitUnitary& u) {
    return {Kind::ControlledU, control, target, -1, u};
  }
};

using GateList = std::vector<Gate>;

inline void apply_gate_list(StateVector& sv, std::span<const Gate> gates) {
  for (const Gate& gate : gates) {
    switch (gate.kind) {
      case Gate::Kind::Hadamard:
        sv.apply_single(static_cast<std::size_t>(gate.q0),
                        SingleQubitUnitary::hadamard());
        break;
      case Gate::Kind::PauliX:
        sv.apply_single(static_cast<std::size_t>(gate.q0),
                        SingleQubitUnitary::pauli_x());
        break;
      case Gate::Kind::Toffoli:
        sv.apply_controlled(
            BasisControl{{static_cast<std::size_t>(gate.q0), 1},
                         {static_cast<std::size_t>(gate.q1), 1}},
            static_cast<std::size_t>(gate.q2), SingleQubitUnitary::pauli_x());
        break;
      case Gate::Kind::ControlledU:
        sv.apply_controlled(BasisControl{{static_cast<std::size_t>(gate.q0), 1}},
                            static_cast<std::size_t>(gate.q1), gate.u);
        break;
    }
  }
}

/// A single-qubit rotation to run under the block's control.
struct ControlledOp {
  int target_qubit = 0;
  SingleQubitUnitary u;
};

/// Decomposes one multi-controlled block into primitives: X gates convert
/// the control value to all-ones, a Toffoli ladder folds the t label qubits
/// into the top ancilla, the listed rotations run controlled on that single
/// ancilla, and the ladder and X gates are undone. Passing the ops of
/// several same-control blocks in one call realizes the cancellation of the
/// adjacent compute/uncompute ladders between them, so the Toffoli count
/// stays 2(t-1) however many rounds share the control. For t = 1 the label
/// qubit controls directly and no ancilla or Toffoli appears.
inline GateList decompose_multicontrolled(int t, std::uint64_t control_value,
                                          std::span<const ControlledOp> ops) {
  if (t < 1) {
    throw ShapeError("register width must be >= 1");
  }
  if (control_value >= (std::uint64_t{1} << t)) {
    throw IndexError("control value " + std::to_string(control_value) +
                     " needs more than " + std::to_string(t) + " bits");
  }
  for (const ControlledOp& op : ops) {
    if (op.target_qubit < 0 || op.target_qubit >= t) {
      throw IndexError("target qubit " + std::to_string(op.target_qubit) +
                       " outside the sample register");
    }
  }

  GateList gates;
  const auto flip_zero_bits = [&] {
    for (int p = 0; p < t; ++p) {
      if (((control_value >> p) & 1) == 0) {
        gates.push_back(Gate::pauli_x(t + p));
      }
    }
  };

  flip_zero_bits();
  if (t == 1) {
    for (const ControlledOp& op : ops) {
      gates.push_back(Gate::controlled_u(t, op.target_qubit, op.u));
    }
  } else {
    // Compute ladder: AND the label qubits into ancilla 3t-2.
    gates.push_back(Gate::toffoli(t, t + 1, 2 * t));
    for (int p = 2; p < t; ++p) {
      gates.push_back(Gate::toffoli(2 * t + p - 2, t + p, 2 * t + p - 1));
    }
    const int top_ancilla = 3 * t - 2;
    for (const ControlledOp& op : ops) {
      gates.push_back(Gate::controlled_u(top_ancilla, op.target_qubit, op.u));
    }
    // Uncompute in reverse.
    for (int p = t - 1; p >= 2; --p) {
      gates.push_back(Gate::toffoli(2 * t + p - 2, t + p, 2 * t + p - 1));
    }
    gates.push_back(Gate::toffoli(t, t + 1, 2 * t));
  }
  flip_zero_bits();
  return gates;
}

/// Cancels X pairs on the same qubit inside every maximal run of consecutive
/// X gates (X gates on distinct qubits commute, and X·X = I). Runs are
/// replaced by one X per odd-parity qubit, in ascending qubit order.
inline GateList elide_adjacent_x(const GateList& gates) {
  GateList out;
  std::vector<int> run;
  const auto flush = [&] {
    std::vector<int> sorted = run;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size();) {
      std::size_t j = i;
      while (j < sorted.size() && sorted[j] == sorted[i]) {
        ++j;
      }
      if ((j - i) % 2 == 1) {
        out.push_back(Gate::pauli_x(sorted[i]));
      }
      i = j;
    }
    run.clear();
  };
  for (const Gate& gate : gates) {
    if (gate.kind == Gate::Kind::PauliX) {
      run.push_back(gate.q0);
    } else {
      flush();
      out.push_back(gate);
    }
  }
  flush();
  return out;
}

struct GateCounts {
  long long hadamard = 0;
  long long pauli_x = 0;
  long long toffoli = 0;
  long long controlled_u = 0;

  long long total() const {
    return hadamard + pauli_x + toffoli + controlled_u;
  }
};

inline GateCounts count_gates(std::span<const Gate> gates) {
  GateCounts counts;
  for (const Gate& gate : gates) {
    switch (gate.kind) {
      case Gate::Kind::Hadamard:
        ++counts.hadamard;
        break;
      case Gate::Kind::PauliX:
        ++counts.pauli_x;
        break;
      case Gate::Kind::Toffoli:
        ++counts.toffoli;
        break;
      case Gate::Kind::ControlledU:
        ++counts.controlled_u;
        break;
    }
  }
  return counts;
}

/// Comparison of the closed-form count against a fully enumerated circuit.
struct ResourceReport {
  int register_width = 0;
  int encoding_units = 0;
  int repetitions = 0;
  Rational formula_gate_count;
  GateCounts enumerated;
  long long pauli_x_before_elision = 0;
  std::vector<long long> toffoli_per_control_value;
  int qubits = 0;
  bool equivalence_checked = false;
  std::vector<std::string> notes;

  std::string to_text() const {
    std::ostringstream out;
    out << "resource audit (t=" << register_width << ", k=" << encoding_units
        << ", m=" << repetitions << ")\n";
    out << "  qubits: " << qubits << " (work " << 2 * register_width
        << " + ancilla " << register_width - 1 << ")\n";
    out << "  formula gate count: " << formula_gate_count.str() << "\n";
    out << "  enumerated gates: " << enumerated.total() << "\n";
    out << "    hadamard:     " << enumerated.hadamard << "\n";
    out << "    pauli-x:      " << enumerated.pauli_x << " ("
        << pauli_x_before_elision << " before elision)\n";
    out << "    toffoli:      " << enumerated.toffoli << "\n";
    out << "    controlled-u: " << enumerated.controlled_u << "\n";
    out << "  toffoli per control value:";
    for (const long long count : toffoli_per_control_value) {
      out << ' ' << count;
    }
    out << "\n";
    out << "  equivalence check: "
        << (equivalence_checked ? "passed on every work-register basis state"
                                : "skipped (register width > 3)")
        << "\n";
    for (const std::string& note : notes) {
      out << "  note: " << note << "\n";
    }
    return out.str();
  }
};

/// Builds the fully decomposed circuit over all 2^t control values and m
/// rounds, verifies it against direct multi-controlled application on every
/// work-register basis state (ancillas |0>), and tabulates gate counts
/// against the closed form. Count differences are reported in the notes, not
/// asserted away.
inline ResourceReport audit(const CircuitShape& shape, int k,
                            std::uint64_t seed = 0x5eed5eedULL) {
  shape.validate();
  if (k < 1) {
    throw ShapeError("audit needs k >= 1");
  }
  const int t = shape.register_width;
  const int m = shape.repetitions;
  const std::uint64_t branches = std::uint64_t{1} << t;

  // Deterministic random rotations, one set per (value, round, qubit, unit).
  Rng rng(seed);
  std::vector<std::vector<SingleQubitUnitary>> units(branches * m * t);
  for (auto& chain : units) {
    chain.reserve(static_cast<std::size_t>(k));
    for (int unit = 0; unit < k; ++unit) {
      chain.push_back(su2(rng.uniform(-3.141592, 3.141592),
                          rng.uniform(-3.141592, 3.141592),
                          rng.uniform(-3.141592, 3.141592)));
    }
  }
  const auto chain_at = [&](std::uint64_t value, int round,
                            int qubit) -> const std::vector<SingleQubitUnitary>& {
    return units[(value * m + round) * t + qubit];
  };

  ResourceReport report;
  report.register_width = t;
  report.encoding_units = k;
  report.repetitions = m;
  report.qubits = qubit_count(t);
  report.formula_gate_count = gate_count_formula(t, k, m);

  // Decomposed circuit: Hadamard layer, then one merged block per control
  // value carrying all m rounds (adjacent ladders cancel inside a value).
  GateList circuit;
  for (int q = t; q < 2 * t; ++q) {
    circuit.push_back(Gate::hadamard(q));
  }
  std::vector<GateList> value_blocks;
  for (std::uint64_t value = 0; value < branches; ++value) {
    std::vector<ControlledOp> ops;
    for (int round = 0; round < m; ++round) {
      for (int qubit = 0; qubit < t; ++qubit) {
        for (const SingleQubitUnitary& u : chain_at(value, round, qubit)) {
          ops.push_back({qubit, u});
        }
      }
    }
    value_blocks.push_back(decompose_multicontrolled(t, value, ops));
    const GateList& block = value_blocks.back();
    report.toffoli_per_control_value.push_back(count_gates(block).toffoli);
    circuit.insert(circuit.end(), block.begin(), block.end());
  }
  report.pauli_x_before_elision = count_gates(circuit).pauli_x;
  circuit = elide_adjacent_x(circuit);
  report.enumerated = count_gates(circuit);

  // Direct reference: the same blocks as plain multi-controlled operators.
  const auto apply_direct = [&](StateVector& sv) {
    for (int q = t; q < 2 * t; ++q) {
      sv.apply_single(static_cast<std::size_t>(q),
                      SingleQubitUnitary::hadamard());
    }
    for (std::uint64_t value = 0; value < branches; ++value) {
      const BasisControl controls = BasisControl::register_value(
          static_cast<std::size_t>(t), static_cast<std::size_t>(t), value);
      for (int round = 0; round < m; ++round) {
        for (int qubit = 0; qubit < t; ++qubit) {
          SingleQubitUnitary v;
          for (const SingleQubitUnitary& u : chain_at(value, round, qubit)) {
            v = u * v;
          }
          sv.apply_controlled(controls, static_cast<std::size_t>(qubit), v);
        }
      }
    }
  };

  if (t <= 3) {
    const std::uint64_t work_dim = std::uint64_t{1} << (2 * t);
    const std::size_t total_qubits = static_cast<std::size_t>(report.qubits);

    // Per-value check first so a failure names the control value.
    for (std::uint64_t value = 0; value < branches; ++value) {
      const BasisControl controls = BasisControl::register_value(
          static_cast<std::size_t>(t), static_cast<std::size_t>(t), value);
      for (std::uint64_t basis = 0; basis < work_dim; ++basis) {
        StateVector decomposed = StateVector::basis(total_qubits, basis);
        apply_gate_list(decomposed, value_blocks[value]);
        StateVector direct = StateVector::basis(2 * static_cast<std::size_t>(t),
                                                basis);
        for (int round = 0; round < m; ++round) {
          for (int qubit = 0; qubit < t; ++qubit) {
            SingleQubitUnitary v;
            for (const SingleQubitUnitary& u : chain_at(value, round, qubit)) {
              v = u * v;
            }
            direct.apply_controlled(controls, static_cast<std::size_t>(qubit),
                                    v);
          }
        }
        for (std::uint64_t i = 0; i < decomposed.dim(); ++i) {
          const std::uint64_t work = i & (work_dim - 1);
          const std::uint64_t ancilla = i >> (2 * t);
          const Complex expected =
              ancilla == 0 ? direct.amplitude(work) : Complex{0.0};
          if (std::abs(decomposed.amplitude(i) - expected) > 1e-9) {
            throw AuditError("decomposition mismatch at control value " +
                             std::to_string(value) + ", basis state " +
                             std::to_string(basis));
          }
        }
      }
    }

    // Whole-circuit check including the Hadamard layer and X elision.
    for (std::uint64_t basis = 0; basis < work_dim; ++basis) {
      StateVector decomposed = StateVector::basis(total_qubits, basis);
      apply_gate_list(decomposed, circuit);
      StateVector direct =
          StateVector::basis(2 * static_cast<std::size_t>(t), basis);
      apply_direct(direct);
      for (std::uint64_t i = 0; i < decomposed.dim(); ++i) {
        const std::uint64_t work = i & (work_dim - 1);
        const std::uint64_t ancilla = i >> (2 * t);
        const Complex expected =
            ancilla == 0 ? direct.amplitude(work) : Complex{0.0};
        if (std::abs(decomposed.amplitude(i) - expected) > 1e-9) {
          throw AuditError("assembled circuit mismatch at basis state " +
                           std::to_string(basis));
        }
      }
    }
    report.equivalence_checked = true;
  }

  if (!report.formula_gate_count.is_integer()) {
    report.notes.push_back("formula value " + report.formula_gate_count.str() +
                           " is not an integer");
  }
  if (!(Rational(report.enumerated.total()) == report.formula_gate_count)) {
    report.notes.push_back(
        "enumerated total " + std::to_string(report.enumerated.total()) +
        " differs from the formula value " + report.formula_gate_count.str());
  }
  return report;
}

}  // namespace qmcc
