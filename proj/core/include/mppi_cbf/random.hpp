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

#ifndef MPPI_CBF_RANDOM_HPP_
#define MPPI_CBF_RANDOM_HPP_

#include <array>
#include <cstdint>

#include <Eigen/Core>

namespace mppi_cbf {

// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// Independent random streams addressed by (seed, domain, step, index). Two
// streams with different addresses never share a counter block, so any
// schedule that evaluates each stream sequentially reproduces the same draws.
class CounterRng {
 public:
  enum class Domain : std::uint32_t {
    kSampling = 0,
    kExecution = 1,
    kAuxiliary = 2,
  };

  CounterRng(std::uint64_t seed, Domain domain, std::uint64_t step,
             std::uint32_t index);

  /// Uniform in the open interval (0, 1) with 53 random bits.
  double uniform();

  /// Pair of independent standard normals (Box-Muller on one block).
  Eigen::Vector2d normal2();

 private:
  std::array<std::uint32_t, 4> next_block();

  std::array<std::uint32_t, 2> key_;
  std::uint32_t index_;
  std::uint32_t step_lo_;
  std::uint32_t stream_;
  std::uint32_t draw_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffered_ = 0;
};

}  // namespace mppi_cbf

#endif  // MPPI_CBF_RANDOM_HPP_
