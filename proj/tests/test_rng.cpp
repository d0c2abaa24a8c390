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

#include <doctest.h>

#include "lindsim/rng.hpp"

using namespace lindsim;

// Known-answer vectors for philox4x32-10 from the reference test suite.
TEST_CASE("philox known answers") {
  auto out = Philox::block({0, 0, 0, 0}, {0, 0});
  CHECK(out[0] == 0x6627e8d5u);
  CHECK(out[1] == 0xe169c58du);
  CHECK(out[2] == 0xbc57ac4cu);
  CHECK(out[3] == 0x9b00dbd8u);

  out = Philox::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                      {0xffffffffu, 0xffffffffu});
  CHECK(out[0] == 0x408f276du);
  CHECK(out[1] == 0x41c83b0eu);
  CHECK(out[2] == 0xa20bc7c6u);
  CHECK(out[3] == 0x6d5451fdu);

  out = Philox::block({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                      {0xa4093822u, 0x299f31d0u});
  CHECK(out[0] == 0xd16cfe09u);
  CHECK(out[1] == 0x94fdccebu);
  CHECK(out[2] == 0x5001e420u);
  CHECK(out[3] == 0x24126ea1u);
}

TEST_CASE("streams are reproducible and distinct") {
  Philox a(42, 7), b(42, 7), c(42, 8);
  bool all_equal = true, any_diff = false;
  for (int k = 0; k < 100; ++k) {
    double va = a.uniform(), vb = b.uniform(), vc = c.uniform();
    all_equal = all_equal && va == vb;
    any_diff = any_diff || va != vc;
    CHECK(va >= 0.0);
    CHECK(va < 1.0);
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("categorical respects weights") {
  Philox rng(3, 0);
  std::vector<double> weights{0.0, 2.0, 0.0};
  for (int k = 0; k < 20; ++k)
    CHECK(rng.categorical(weights) == 1);

  // Frequency sanity on an uneven pair.
  std::vector<double> pair{1.0, 3.0};
  int ones = 0;
  const int trials = 20000;
  for (int k = 0; k < trials; ++k) ones += rng.categorical(pair) == 1;
  double freq = static_cast<double>(ones) / trials;
  CHECK(freq > 0.72);
  CHECK(freq < 0.78);
}
