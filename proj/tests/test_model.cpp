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

#include "lindsim/model.hpp"
#include "lindsim/verify.hpp"

using namespace lindsim;

namespace {

Lindbladian amplitude_damping() {
  PauliSum h(1, {{{Axis::Z}, Phase::Plus, 0.5}});
  PauliSum jump(1, {{{Axis::X}, Phase::Plus, 0.5},
                    {{Axis::Y}, Phase::PlusI, 0.5}});
  return Lindbladian(1, std::move(h), {std::move(jump)});
}

}  // namespace

TEST_CASE("derived params for amplitude damping") {
  auto p = derived_params(amplitude_damping());
  CHECK(p.lambda == doctest::Approx(1.5));
  CHECK(p.c.size() == 1);
  CHECK(p.c[0] == doctest::Approx(1.0));
  CHECK(p.m == 1);
  CHECK(p.q == 2);
  CHECK(p.q0 == 1);
}

TEST_CASE("depolarizing scenario") {
  auto model = scenario_depolarizing(1);
  CHECK(model.jumps.size() == 4);
  for (const auto& jump : model.jumps) {
    CHECK(jump.size() == 1);
    CHECK(jump.terms[0].weight == doctest::Approx(0.5));
  }
  auto p = derived_params(model);
  CHECK(p.lambda == doctest::Approx(1.0));

  auto two = scenario_depolarizing(2);
  CHECK(two.jumps.size() == 16);
  CHECK(two.jumps[3].terms[0].weight == doctest::Approx(0.25));

  PauliSum h(1, {{{Axis::Z}, Phase::Plus, 0.5}});
  auto with_h = scenario_depolarizing(1, h);
  CHECK(derived_params(with_h).lambda == doctest::Approx(1.5));
}

TEST_CASE("xy scenario") {
  auto model = scenario_xy(2, -1.0, Topology::FullyConnected);
  auto p = derived_params(model);
  CHECK(p.lambda == doctest::Approx(4.0));
  CHECK(model.hamiltonian.size() == 2);
  CHECK(model.jumps.size() == 2);

  auto three = scenario_xy(3, -1.0, Topology::FullyConnected);
  CHECK(derived_params(three).lambda == doctest::Approx(9.0));
  // Term count is n(n-1): each edge contributes an XX and a YY string.
  CHECK(three.hamiltonian.size() == 6);

  auto positive_j = scenario_xy(2, 1.0, Topology::FullyConnected);
  for (const auto& term : positive_j.hamiltonian.terms) {
    CHECK(term.weight == doctest::Approx(1.0));
    CHECK(term.phase == Phase::Minus);
  }
}

TEST_CASE("collective lowering scenario") {
  auto single = scenario_collective_lowering(1, {{{0}, 1.0}});
  CHECK(single.jumps.size() == 1);
  CHECK(single.jumps[0].size() == 2);
  CHECK(pauli_norm(single.jumps[0]) == doctest::Approx(1.0));

  auto pair = scenario_collective_lowering(2, {{{0, 1}, 1.0}});
  CHECK(pair.jumps[0].size() == 4);
  for (const auto& term : pair.jumps[0].terms)
    CHECK(term.weight == doctest::Approx(0.25));

  auto all = scenario_collective_lowering(
      2, {{{0}, 1.0}, {{1}, 1.0}, {{0, 1}, 1.0}});
  CHECK(all.jumps.size() == 3);
  CHECK_THROWS(scenario_collective_lowering(2, {{{}, 1.0}}));
}

TEST_CASE("mixture distribution") {
  auto mix = mixture_distribution(amplitude_damping());
  REQUIRE(mix.weights.size() == 2);
  CHECK(mix.weights[0] == doctest::Approx(1.0 / 3));
  CHECK(mix.weights[1] == doctest::Approx(2.0 / 3));

  auto depol = mixture_distribution(scenario_depolarizing(1));
  for (double w : depol.weights) CHECK(w == doctest::Approx(0.25));

  PauliSum h(1, {{{Axis::X}, Phase::Plus, 0.7}});
  auto h_only = mixture_distribution(Lindbladian(1, h, {}));
  CHECK(h_only.weights.size() == 1);
  CHECK(h_only.weights[0] == doctest::Approx(1.0));
}

TEST_CASE("mixture weights sum to one on random models") {
  Philox rng(5, 0);
  for (int trial = 0; trial < 30; ++trial) {
    auto model = random_model(rng, 1 + trial % 2);
    auto mix = mixture_distribution(model);
    double total = 0;
    for (double w : mix.weights) total += w;
    CHECK(std::abs(total - 1.0) < 1e-12);
  }
}

TEST_CASE("parse and serialize round trip") {
  std::string text = R"({
    "n": 1,
    "hamiltonian": [{"pauli": "Z", "coeff": 0.5}],
    "jumps": [[{"pauli": "X", "coeff": 0.5}, {"pauli": "Y", "coeff": "0.5i"}]]
  })";
  auto model = parse_model(text);
  auto p = derived_params(model);
  CHECK(p.lambda == doctest::Approx(1.5));

  std::string serialized = serialize_model(model);
  auto reparsed = parse_model(serialized);
  CHECK(serialize_model(reparsed) == serialized);
}

TEST_CASE("round trip on random models") {
  Philox rng(6, 0);
  for (int trial = 0; trial < 20; ++trial) {
    auto model = random_model(rng, 1 + trial % 2);
    auto text = serialize_model(model);
    CHECK(serialize_model(parse_model(text)) == text);
  }
}

TEST_CASE("parser error paths") {
  CHECK_THROWS_AS(parse_model("{"), ModelParseError);
  // Wrong string length for declared n.
  CHECK_THROWS_AS(
      parse_model(R"({"n": 3, "hamiltonian": [{"pauli": "XZ", "coeff": 1}]})"),
      ModelParseError);
  // Stale declared q.
  CHECK_THROWS_AS(
      parse_model(
          R"({"n": 1, "q": 5, "hamiltonian": [{"pauli": "Z", "coeff": 1}]})"),
      ModelParseError);
  // Empty jumps list is a valid closed system.
  auto closed = parse_model(
      R"({"n": 1, "hamiltonian": [{"pauli": "Z", "coeff": 1}], "jumps": []})");
  CHECK(closed.jumps.empty());
  // Negative coefficients normalize instead of failing.
  auto negated = parse_model(
      R"({"n": 1, "hamiltonian": [{"pauli": "Z", "coeff": -0.5}]})");
  CHECK(negated.hamiltonian.terms[0].phase == Phase::Minus);
  CHECK(negated.hamiltonian.terms[0].weight == doctest::Approx(0.5));
  // Syntax errors carry a line number.
  try {
    parse_model("{\n  \"n\": 1,\n  bad\n}");
    CHECK(false);
  } catch (const ModelParseError& e) {
    CHECK(e.line >= 2);
  }
}

TEST_CASE("zero-norm jumps are dropped with a note") {
  PauliSum h(1, {{{Axis::Z}, Phase::Plus, 0.5}});
  PauliSum empty_jump(1, {});
  Lindbladian model(1, h, {empty_jump});
  CHECK(model.jumps.empty());
  CHECK(model.dropped_jumps.size() == 1);
}

TEST_CASE("imaginary Hamiltonian phases rejected") {
  CHECK_THROWS(Lindbladian(
      1, PauliSum(1, {{{Axis::Y}, Phase::PlusI, 1.0}}), {}));
}
