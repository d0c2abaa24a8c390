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

#include "lindsim/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lindsim {

namespace {

constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr uint32_t kWeyl0 = 0x9E3779B9u;  // golden ratio
constexpr uint32_t kWeyl1 = 0xBB67AE85u;  // sqrt(3) - 1

inline void mulhilo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
  uint64_t p = static_cast<uint64_t>(a) * b;
  hi = static_cast<uint32_t>(p >> 32);
  lo = static_cast<uint32_t>(p);
}

inline void philox_round(std::array<uint32_t, 4>& x,
                         const std::array<uint32_t, 2>& k) {
  uint32_t hi0, lo0, hi1, lo1;
  mulhilo(kPhiloxM0, x[0], hi0, lo0);
  mulhilo(kPhiloxM1, x[2], hi1, lo1);
  x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
}

}  // namespace

Philox::Block Philox::block(const Block& counter,
                            const std::array<uint32_t, 2>& key) {
  Block x = counter;
  std::array<uint32_t, 2> k = key;
  for (int round = 0; round < 10; ++round) {
    philox_round(x, k);
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return x;
}

Philox::Philox(uint64_t seed, uint64_t stream) {
  // Key = seed mixed with the stream index; the counter starts at zero so
  // a (seed, stream) pair fully determines the sequence.
  uint64_t k = seed ^ (stream * 0x9E3779B97F4A7C15ull + 0x243F6A8885A308D3ull);
  key_ = {static_cast<uint32_t>(k), static_cast<uint32_t>(k >> 32)};
}

Philox::Block Philox::next_block() {
  Block out = block(counter_, key_);
  for (int i = 0; i < 4; ++i) {
    if (++counter_[i] != 0) break;
  }
  return out;
}

uint32_t Philox::next_u32() {
  if (buffered_ == 0) {
    buffer_ = next_block();
    buffered_ = 4;
  }
  return buffer_[4 - buffered_--];
}

double Philox::uniform() {
  uint64_t hi = next_u32();
  uint64_t lo = next_u32();
  uint64_t bits = ((hi << 32) | lo) >> 11;  // 53 significant bits
  return static_cast<double>(bits) * 0x1.0p-53;
}

uint64_t Philox::uniform_int(uint64_t n) {
  if (n == 0) throw std::invalid_argument("uniform_int: n must be positive");
  // Rejection sampling for an unbiased draw.
  uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  for (;;) {
    uint64_t hi = next_u32();
    uint64_t lo = next_u32();
    uint64_t v = (hi << 32) | lo;
    if (v < limit) return v % n;
  }
}

std::size_t Philox::categorical(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (w < 0) throw std::invalid_argument("categorical: negative weight");
    total += w;
  }
  if (total <= 0) throw std::invalid_argument("categorical: zero total weight");
  double u = uniform() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  return weights.size() - 1;
}

double Philox::normal() {
  double u1 = uniform();
  double u2 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace lindsim
