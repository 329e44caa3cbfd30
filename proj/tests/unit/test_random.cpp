// Copyright 2026 The MPPI-CBF Authors
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

#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "mppi_cbf/random.hpp"
#include "oracles.hpp"

namespace mppi_cbf {
namespace {

using Domain = CounterRng::Domain;

TEST(Random, PhiloxKnownAnswers) {
  for (const auto& v : oracle::philox_vectors()) {
    EXPECT_EQ(philox4x32(v.counter, v.key), v.expected);
  }
}

TEST(Random, StreamsAreReproducible) {
  CounterRng a(42, Domain::kSampling, 3, 7);
  CounterRng b(42, Domain::kSampling, 3, 7);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.uniform(), b.uniform());
}

TEST(Random, DistinctAddressesGiveDistinctStreams) {
  std::set<double> first;
  for (std::uint64_t seed : {0u, 1u})
    for (Domain d : {Domain::kSampling, Domain::kExecution, Domain::kAuxiliary})
      for (std::uint64_t step : {0u, 1u})
        for (std::uint32_t index : {0u, 1u}) first.insert(CounterRng(seed, d, step, index).uniform());
  EXPECT_EQ(first.size(), 24u);
}

TEST(Random, UniformIsInOpenUnitInterval) {
  CounterRng rng(1, Domain::kAuxiliary, 0, 0);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
}

TEST(Random, NormalMoments) {
  CounterRng rng(2, Domain::kAuxiliary, 0, 0);
  const int n = 100000;
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d second = Eigen::Matrix2d::Zero();
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d z = rng.normal2();
    mean += z;
    second += z * z.transpose();
  }
  mean /= n;
  second /= n;
  EXPECT_LT(mean.norm(), 0.015);
  EXPECT_LT((second - Eigen::Matrix2d::Identity()).norm(), 0.03);
}

}  // namespace
}  // namespace mppi_cbf
