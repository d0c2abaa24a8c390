// Copyright 2026 The lindsim Authors.
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

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace lindsim {

/**
 * Philox4x32-10 counter-based generator.
 *
 * Streams are addressed by (seed, stream): the 64-bit key holds the user
 * seed XOR-folded with the stream index, and the 128-bit counter advances
 * per block. Substreams derived from different stream indices are
 * statistically independent, which gives bitwise-reproducible parallel
 * sampling: trajectory i always consumes the same numbers no matter how
 * many trajectories run or in what order.
 */
class Philox {
 public:
  using Block = std::array<uint32_t, 4>;

  Philox(uint64_t seed, uint64_t stream = 0);

  /// One raw 128-bit block for the current counter (advances the counter).
  Block next_block();

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform();

  /// Uniform integer in [0, n).
  uint64_t uniform_int(uint64_t n);

  /// Index sampled from unnormalized nonnegative weights.
  std::size_t categorical(std::span<const double> weights);

  /// Standard normal via Box-Muller (one value per call, no caching).
  double normal();

  /// Static single-block evaluation, used by the known-answer tests.
  static Block block(const Block& counter, const std::array<uint32_t, 2>& key);

 private:
  std::array<uint32_t, 2> key_;
  Block counter_{};
  Block buffer_{};
  int buffered_ = 0;

  uint32_t next_u32();
};

}  // namespace lindsim
