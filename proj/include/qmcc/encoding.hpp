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

#include "qmcc/error.hpp"
#include "qmcc/statevector.hpp"

namespace qmcc {

/// A feature vector prepared for circuit loading, plus its class id.
/// Features are normalized to [0, 1] and zero-padded to a multiple of 3 so
/// they split into groups of three rotation angles.
struct EncodedSample {
  std::vector<double> features;
  int label = 0;
};

/// Zero-pads x to the smallest multiple of 3 that fits it.
inline std::vector<double> pad_features(std::span<const double> x) {
  if (x.empty()) {
    throw ShapeError("cannot pad an empty feature vector");
  }
  std::vector<double> padded(x.begin(), x.end());
  padded.resize((x.size() + 2) / 3 * 3, 0.0);
  return padded;
}

/// General single-qubit rotation U(phi1, phi2, phi3) in the ZYZ convention:
/// Rz(phi3) * Ry(phi2) * Rz(phi1).
inline SingleQubitUnitary su2(double phi1, double phi2, double phi3) {
  if (!std::isfinite(phi1) || !std::isfinite(phi2) || !std::isfinite(phi3)) {
    throw NumericError("su2 angles must be finite");
  }
  const double c = std::cos(phi2 / 2.0);
  const double s = std::sin(phi2 / 2.0);
  const double sum = (phi1 + phi3) / 2.0;
  const double diff = (phi1 - phi3) / 2.0;
  return {Complex{std::cos(sum), -std::sin(sum)} * c,
          Complex{std::cos(diff), std::sin(diff)} * -s,
          Complex{std::cos(diff), -std::sin(diff)} * s,
          Complex{std::cos(sum), std::sin(sum)} * c};
}

/// Data-loading operator V(x, w): K successive weighted rotations, one per
/// group of three features. Group k contributes U(w∘x) over that group, with
/// group 0 applied first (the rightmost factor of the matrix product).
inline SingleQubitUnitary build_v(std::span<const double> features,
                                  std::span<const double> weights) {
  if (features.empty() || features.size() % 3 != 0) {
    throw ShapeError("feature length must be a positive multiple of 3, got " +
                     std::to_string(features.size()));
  }
  if (weights.size() != features.size()) {
    throw ShapeError("expected " + std::to_string(features.size()) +
                     " weights, got " + std::to_string(weights.size()));
  }
  SingleQubitUnitary v = su2(weights[0] * features[0], weights[1] * features[1],
                             weights[2] * features[2]);
  for (std::size_t k = 3; k < features.size(); k += 3) {
    v = su2(weights[k] * features[k], weights[k + 1] * features[k + 1],
            weights[k + 2] * features[k + 2]) *
        v;
  }
  return v;
}

}  // namespace qmcc
