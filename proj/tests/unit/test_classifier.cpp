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

#include <cmath>
#include <numbers>
#include <vector>

#include "qmcc/classifier.hpp"
#include "qmcc/rng.hpp"
#include "support/test_helpers.hpp"

using qmcc::CircuitShape;
using qmcc::EncodedSample;
using qmcc::ParameterTensor;
using qmcc::Rng;
namespace ts = qmcc::testsupport;

TEST_CASE("predict_probs") {
  SECTION("all-zero weights put every branch on outcome 0") {
    const CircuitShape shape = CircuitShape::for_classes(2, 1, 1);
    const std::vector<double> x(3, 0.5);
    const auto probs = qmcc::predict_probs(shape, ParameterTensor(shape), x);
    REQUIRE(probs.size() == 2);
    CHECK(probs[0] == Catch::Approx(1.0).margin(1e-12));
    CHECK(probs[1] == Catch::Approx(0.0).margin(1e-12));
  }
  SECTION("identity and flip branches split evenly") {
    const CircuitShape shape = CircuitShape::for_classes(2, 1, 1);
    const std::vector<double> ones(3, 1.0);
    const auto probs =
        qmcc::predict_probs(shape, ts::perfect_weights(shape), ones);
    CHECK(probs[0] == Catch::Approx(0.5).margin(1e-12));
    CHECK(probs[1] == Catch::Approx(0.5).margin(1e-12));
  }
  SECTION("probabilities sum to one for random weights") {
    const CircuitShape shape = CircuitShape::for_classes(5, 2, 3);
    Rng rng(6);
    for (int trial = 0; trial < 10; ++trial) {
      Rng init(40 + trial);
      const ParameterTensor weights =
          ParameterTensor::random_init(shape, init);
      std::vector<double> x(shape.padded_dim());
      for (double& f : x) {
        f = rng.uniform();
      }
      const auto probs = qmcc::predict_probs(shape, weights, x);
      double sum = 0.0;
      for (const double p : probs) {
        sum += p;
      }
      REQUIRE(std::abs(sum - 1.0) < 1e-10);
      // Padding floor: the unused branches land on outcome 0.
      REQUIRE(probs[0] >= 0.25 - 1e-12);
    }
  }
  SECTION("feature length mismatch rejected") {
    const CircuitShape shape = CircuitShape::for_classes(2, 1, 2);
    CHECK_THROWS_AS(qmcc::predict_probs(shape, ParameterTensor(shape),
                                        std::vector<double>(3, 0.1)),
                    qmcc::ShapeError);
  }
}

TEST_CASE("classify decodes the class window") {
  SECTION("two classes use plain argmax") {
    const CircuitShape shape = CircuitShape::for_classes(2, 1, 1);
    ParameterTensor weights(shape);
    // Class 1 branch rotates |0> most of the way to |1>.
    weights.at(1, 0, 0, 0, 1) = 2.6;
    const std::vector<double> ones(3, 1.0);
    const auto probs = qmcc::predict_probs(shape, weights, ones);
    CHECK(probs[0] > probs[1]);
    CHECK(qmcc::classify(shape, weights, ones) == 0);

    ParameterTensor both(shape);
    both.at(0, 0, 0, 0, 1) = std::numbers::pi;
    both.at(1, 0, 0, 0, 1) = std::numbers::pi;
    CHECK(qmcc::classify(shape, both, ones) == 1);
  }
  SECTION("five classes skip the padding outcome and shift down") {
    const CircuitShape shape = CircuitShape::for_classes(5, 1, 1);
    // Branch value 3 = class 2 gets all its sample mass; every other class
    // stays at |000>, so outcome 0 keeps the largest probability overall.
    ParameterTensor weights(shape);
    for (int j = 0; j < shape.register_width; ++j) {
      if ((3 >> j) & 1) {
        weights.at(2, 0, j, 0, 1) = std::numbers::pi;
      }
    }
    const std::vector<double> ones(shape.padded_dim(), 1.0);
    const auto probs = qmcc::predict_probs(shape, weights, ones);
    CHECK(probs[0] > probs[3]);  // padding artifact dominates
    CHECK(probs[3] == Catch::Approx(1.0 / 8.0).margin(1e-12));
    CHECK(qmcc::classify(shape, weights, ones) == 2);
  }
  SECTION("exact ties break toward the smaller class id") {
    const CircuitShape shape = CircuitShape::for_classes(5, 1, 1);
    const std::vector<double> zeros(shape.padded_dim(), 0.0);
    Rng init(12);
    const ParameterTensor weights = ParameterTensor::random_init(shape, init);
    // Zero features force identity loading: every class outcome ties at 0.
    CHECK(qmcc::classify(shape, weights, zeros) == 0);
  }
}

TEST_CASE("classification ignores branch-level global phases") {
  const CircuitShape shape = CircuitShape::for_classes(2, 1, 2);
  Rng init(19);
  ParameterTensor weights = ParameterTensor::random_init(shape, init);
  ParameterTensor shifted = weights;
  // With unit features, +2*pi on a Z angle multiplies the branch state by
  // exactly -1; the readout probabilities may not move.
  shifted.at(0, 0, 0, 0, 0) += 2.0 * std::numbers::pi;
  const std::vector<double> x(shape.padded_dim(), 1.0);
  const auto before = qmcc::predict_probs(shape, weights, x);
  const auto after = qmcc::predict_probs(shape, shifted, x);
  for (std::size_t i = 0; i < before.size(); ++i) {
    CHECK(before[i] == Catch::Approx(after[i]).margin(1e-12));
  }
  CHECK(qmcc::classify(shape, weights, x) == qmcc::classify(shape, shifted, x));
}

TEST_CASE("evaluate_accuracy") {
  const CircuitShape shape = CircuitShape::for_classes(2, 1, 1);
  const ParameterTensor perfect = ts::perfect_weights(shape);
  const std::vector<double> ones(3, 1.0);

  SECTION("a zero-cost training tuple classifies perfectly") {
    // Class 0 sample (0,0,0), class 1 sample (1,1,1). Class 0 carries a
    // quarter turn that vanishes on its own sample but bends the class-1
    // sample away from |0>, so inference separates strictly.
    ParameterTensor weights(shape);
    weights.at(0, 0, 0, 0, 1) = std::numbers::pi / 2.0;
    weights.at(1, 0, 0, 0, 1) = std::numbers::pi;
    const qmcc::SampleTuple tuple{{std::vector<double>(3, 0.0), 0},
                                  {ones, 1}};
    CHECK(qmcc::cost(shape, {tuple}, weights) ==
          Catch::Approx(0.0).margin(1e-12));
    CHECK(qmcc::evaluate_accuracy(shape, weights, tuple) == 1.0);
  }
  SECTION("single sample yields 0 or 1") {
    const std::vector<EncodedSample> hit{{std::vector<double>(3, 0.0), 0}};
    const std::vector<EncodedSample> miss{{std::vector<double>(3, 0.0), 1}};
    CHECK(qmcc::evaluate_accuracy(shape, perfect, hit) == 1.0);
    CHECK(qmcc::evaluate_accuracy(shape, perfect, miss) == 0.0);
  }
  SECTION("adversarially flipped labels complement the accuracy") {
    Rng rng(3);
    Rng init(4);
    const ParameterTensor weights = ParameterTensor::random_init(shape, init);
    std::vector<EncodedSample> samples;
    for (int n = 0; n < 20; ++n) {
      std::vector<double> x(3);
      for (double& f : x) {
        f = rng.uniform();
      }
      samples.push_back({x, static_cast<int>(rng.below(2))});
    }
    std::vector<EncodedSample> flipped = samples;
    for (EncodedSample& sample : flipped) {
      sample.label = 1 - sample.label;
    }
    const double acc = qmcc::evaluate_accuracy(shape, weights, samples);
    const double flipped_acc =
        qmcc::evaluate_accuracy(shape, weights, flipped);
    CHECK(acc + flipped_acc == Catch::Approx(1.0).margin(1e-12));
  }
  SECTION("empty set rejected") {
    CHECK_THROWS_AS(qmcc::evaluate_accuracy(shape, perfect, {}),
                    qmcc::DataError);
  }
}

TEST_CASE("shot-sampled classification is seeded and consistent in the limit") {
  const CircuitShape shape = CircuitShape::for_classes(2, 1, 1);
  ParameterTensor weights(shape);
  weights.at(1, 0, 0, 0, 1) = 2.9;  // strong flip on the class-1 branch
  const std::vector<double> ones(3, 1.0);
  const int exact = qmcc::classify(shape, weights, ones);
  CHECK(qmcc::classify_sampled(shape, weights, ones, 8192, 5) == exact);
  CHECK(qmcc::classify_sampled(shape, weights, ones, 8192, 5) ==
        qmcc::classify_sampled(shape, weights, ones, 8192, 5));
  CHECK_THROWS_AS(qmcc::classify_sampled(shape, weights, ones, 0, 5),
                  qmcc::NumericError);
}
