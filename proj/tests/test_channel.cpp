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

#include "lindsim/channel.hpp"
#include "lindsim/verify.hpp"

using namespace lindsim;

namespace {

Lindbladian decay_only() {
  PauliSum jump(1, {{{Axis::X}, Phase::Plus, 0.5},
                    {{Axis::Y}, Phase::PlusI, 0.5}});
  return Lindbladian(1, PauliSum(1, {}), {jump});
}

Matrix density(std::initializer_list<cd> entries, Eigen::Index d) {
  Matrix m(d, d);
  auto it = entries.begin();
  for (Eigen::Index r = 0; r < d; ++r)
    for (Eigen::Index c = 0; c < d; ++c) m(r, c) = *it++;
  return m;
}

}  // namespace

TEST_CASE("liouvillian decay generator") {
  Matrix gen = liouvillian_superop(decay_only());
  // d/dt vec(|1><1|) should add population at |0><0| and remove it at
  // |1><1|.
  Matrix rho = density({0, 0, 0, 1}, 2);
  Matrix deriv = unvectorize(gen * vectorize(rho), 2);
  CHECK(deriv(0, 0).real() == doctest::Approx(1.0));
  CHECK(deriv(1, 1).real() == doctest::Approx(-1.0));
  CHECK(std::abs(deriv(0, 1)) < 1e-14);
}

TEST_CASE("liouvillian commutator case") {
  PauliSum h(1, {{{Axis::Z}, Phase::Plus, 0.5}});
  Lindbladian model(1, h, {});
  Matrix gen = liouvillian_superop(model);
  Matrix plus = density({0.5, 0.5, 0.5, 0.5}, 2);
  Matrix lhs = unvectorize(gen * vectorize(plus), 2);
  Matrix hd = h.to_dense();
  Matrix rhs = cd(0, -1) * (hd * plus - plus * hd);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("liouvillian preserves trace on random models") {
  Philox rng(21, 0);
  for (int trial = 0; trial < 20; ++trial) {
    auto model = random_model(rng, 1 + trial % 2);
    Matrix gen = liouvillian_superop(model);
    const Eigen::Index d = Eigen::Index{1} << model.n;
    // tr(L rho) = 0 for all rho: the identity-dual row annihilates L.
    Vector id_dual = vectorize(Matrix::Identity(d, d));
    Vector row = gen.adjoint() * id_dual;
    CHECK(row.cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("exact channel closed forms") {
  CHECK((exact_channel(decay_only(), 0.0).superop() -
         Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-14);

  // Population decay: <1|rho(t)|1> = e^{-t} <1|rho(0)|1>.
  for (double t : {0.1, 0.5, 1.0, 2.0}) {
    Matrix rho1 = density({0, 0, 0, 1}, 2);
    Matrix evolved = exact_channel(decay_only(), t).apply(rho1);
    CHECK(evolved(1, 1).real() == doctest::Approx(std::exp(-t)).epsilon(1e-9));
  }

  // Depolarizing closed form with lambda(t) = 1 - e^{-t}.
  auto depol = scenario_depolarizing(1);
  double t = 0.7;
  Matrix rho0 = density({1, 0, 0, 0}, 2);
  Matrix evolved = exact_channel(depol, t).apply(rho0);
  double lam = 1 - std::exp(-t);
  Matrix expected = (1 - lam) * rho0 + lam * Matrix::Identity(2, 2) / 2;
  CHECK((evolved - expected).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("exact channel is CPTP and a semigroup") {
  Philox rng(22, 0);
  for (int trial = 0; trial < 10; ++trial) {
    auto model = random_model(rng, 1 + trial % 2);
    double s = 0.2 + 0.3 * rng.uniform();
    double t = 0.1 + 0.4 * rng.uniform();
    ChannelRep big = exact_channel(model, s + t);
    ChannelRep left = exact_channel(model, t);
    ChannelRep right = exact_channel(model, s);
    CHECK((big.superop() - left.superop() * right.superop())
              .cwiseAbs()
              .maxCoeff() < 1e-9);
    CHECK(big.cp_defect() <= 1e-10);
    CHECK(big.tp_defect() <= 1e-10);
  }
}

TEST_CASE("representation conversions are mutually consistent") {
  Philox rng(23, 0);
  for (int trial = 0; trial < 10; ++trial) {
    auto model = random_model(rng, 1 + trial % 2);
    ChannelRep channel = exact_channel(model, 0.3);
    Matrix via_choi = choi_to_superop(channel.choi(), channel.dim());
    CHECK((via_choi - channel.superop()).cwiseAbs().maxCoeff() < 1e-10);
    Matrix via_kraus = kraus_to_superop(channel.kraus());
    CHECK((via_kraus - channel.superop()).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("first order map") {
  auto model = decay_only();
  CHECK((first_order_map(model, 0.0).superop() - Matrix::Identity(4, 4))
            .cwiseAbs()
            .maxCoeff() < 1e-14);
  // Trace-preserving for any delta.
  Matrix s = first_order_map(model, 0.37).superop();
  Vector id_dual = vectorize(Matrix::Identity(2, 2));
  CHECK(((s.adjoint() * id_dual) - id_dual).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("first order bound (2 lambda delta)^2") {
  Philox rng(24, 0);
  for (int trial = 0; trial < 10; ++trial) {
    auto model = random_model(rng, 1 + trial % 2);
    auto p = derived_params(model);
    for (double target : {0.2, 0.1, 0.05, 0.01}) {
      double delta = target / p.lambda;
      double dist =
          choi_distance(first_order_map(model, delta),
                        exact_channel(model, delta));
      CHECK(dist <= 4 * target * target);
    }
  }
}

TEST_CASE("choi distance examples") {
  ChannelRep id = ChannelRep::identity(2);
  CHECK(choi_distance(id, id) == doctest::Approx(0.0));

  // Fully depolarizing single qubit: rho -> I/2.
  std::vector<Matrix> kraus;
  for (Axis a : {Axis::I, Axis::X, Axis::Y, Axis::Z})
    kraus.push_back(0.5 * to_dense(PauliTerm{{a}, Phase::Plus, 1.0}));
  ChannelRep depol = ChannelRep::from_kraus(kraus);
  CHECK(choi_distance(id, depol) == doctest::Approx(1.5).epsilon(1e-10));

  Philox rng(25, 0);
  for (int trial = 0; trial < 20; ++trial) {
    auto a = exact_channel(random_model(rng, 1), 0.2);
    auto b = exact_channel(random_model(rng, 1), 0.4);
    CHECK(choi_distance(a, b) ==
          doctest::Approx(choi_distance(b, a)).epsilon(1e-12));
  }
}

TEST_CASE("state trace distance") {
  Matrix zero = density({1, 0, 0, 0}, 2);
  Matrix one = density({0, 0, 0, 1}, 2);
  CHECK(state_trace_distance(zero, zero) == doctest::Approx(0.0));
  CHECK(state_trace_distance(zero, one) == doctest::Approx(1.0));
  CHECK(state_trace_distance(zero, Matrix::Identity(2, 2) / 2) ==
        doctest::Approx(0.5));
}
