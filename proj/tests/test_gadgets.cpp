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

#include "lindsim/gadgets.hpp"
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

TEST_CASE("gadget angle bookkeeping") {
  GadgetParams g = compute_gadget_params(1.0, 0.1);  // lambda*delta = 0.1
  CHECK(g.p_target == doctest::Approx(0.8));
  CHECK(g.alpha == doctest::Approx(std::atan(0.1)));
  CHECK(g.p1 == doctest::Approx(1.0 / 1.21));
  CHECK(g.p1 > g.p_target);
  CHECK(g.beta1 ==
        doctest::Approx(std::atan(std::sqrt(g.p1 / g.p_target) - 1)));
  CHECK(g.alpha2 == doctest::Approx(std::atan(0.05)));
  CHECK(g.alpha1 == doctest::Approx(std::atan(0.1 / (1.05 * 1.05))));
  CHECK(g.p2 == doctest::Approx(1.0 / (0.1 + 1.05 * 1.05)));
  CHECK(g.p2 > g.p_target);
  // The tuning rotation carries amplitude sqrt(p/p_raw) = 1/(1+tan(beta)).
  CHECK(1.0 / (1.0 + std::tan(g.tune_f)) ==
        doctest::Approx(g.p_target / g.p1));
  CHECK(1.0 / (1.0 + std::tan(g.beta1)) ==
        doctest::Approx(std::sqrt(g.p_target / g.p1)));
}

TEST_CASE("F gadget implements p times the channel") {
  auto model = amplitude_damping();
  auto p = derived_params(model);
  for (double target : {0.2, 0.1, 0.01}) {
    double delta = target / p.lambda;
    double p_goal = 1 - 2 * target;
    PurificationCircuit gadget = gadget_F(0, model, delta, p_goal);
    auto channels = build_individual_channels(model, delta);
    Matrix implemented = purified_channel_superop(gadget, model.n);
    Matrix expected = p_goal * kraus_to_superop(channels[0].kraus);
    CHECK((implemented - expected).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("F gadget tends to the identity as delta -> 0") {
  auto model = amplitude_damping();
  PurificationCircuit gadget = gadget_F(0, model, 1e-8 / 1.5, 1 - 2e-8);
  Matrix implemented = purified_channel_superop(gadget, model.n);
  CHECK((implemented - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("E gadget implements p times the jump channel") {
  auto model = amplitude_damping();
  auto p = derived_params(model);
  for (double target : {0.2, 0.1, 0.01}) {
    double delta = target / p.lambda;
    double p_goal = 1 - 2 * target;
    PurificationCircuit gadget = gadget_E(0, model, delta, p_goal);
    auto channels = build_individual_channels(model, delta);
    Matrix implemented = purified_channel_superop(gadget, model.n);
    Matrix expected = p_goal * kraus_to_superop(channels[1].kraus);
    CHECK((implemented - expected).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("E gadget branch amplitudes") {
  auto model = amplitude_damping();
  auto p = derived_params(model);
  double target = 0.1;
  double delta = target / p.lambda;
  double p_goal = 1 - 2 * target;
  PurificationCircuit gadget = gadget_E(0, model, delta, p_goal);

  Vector psi(2);
  psi << std::cos(0.4), std::sin(0.4);
  const Circuit& c = gadget.circuit;
  State in(std::size_t{1} << c.width, cd{0, 0});
  in[0] = psi(0);
  in[1] = psi(1);
  simulate(c, in);

  // ctrl = 0 components, split by the selection qubit (the top bit).
  const int n_state = model.n;
  const std::uint64_t sel_shift = c.width - 1;
  Matrix lj = model.jumps[0].to_dense();
  Vector jump_branch = std::sqrt(p_goal * target) * (lj / p.c[0]) * psi;
  Matrix a0 =
      Matrix::Identity(2, 2) -
      (target / (2 * p.c[0] * p.c[0])) * (lj.adjoint() * lj);
  Vector damp_branch = std::sqrt(p_goal) * a0 * psi;
  for (int s = 0; s < 2; ++s) {
    std::uint64_t damp_idx = static_cast<std::uint64_t>(s);
    std::uint64_t jump_idx = (std::uint64_t{1} << sel_shift) | s;
    CHECK(std::abs(in[damp_idx] - damp_branch(s)) < 1e-12);
    CHECK(std::abs(in[jump_idx] - jump_branch(s)) < 1e-12);
  }
  (void)n_state;
}

TEST_CASE("gadget contract across the depolarizing scenario") {
  auto model = scenario_depolarizing(1);
  auto p = derived_params(model);
  double target = 0.1;
  double delta = target / p.lambda;
  double p_goal = 1 - 2 * target;
  auto channels = build_individual_channels(model, delta);
  for (int j = 0; j < p.m; ++j) {
    PurificationCircuit gadget = gadget_E(j, model, delta, p_goal);
    Matrix implemented = purified_channel_superop(gadget, model.n);
    Matrix expected = p_goal * kraus_to_superop(channels[j].kraus);
    CHECK((implemented - expected).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("W with a single F slot carries amplitude one half") {
  auto model = amplitude_damping();
  auto p = derived_params(model);
  double target = 0.1;
  double delta = target / p.lambda;
  SimulationW w = build_W({0}, model, delta, GadgetForm::Full);

  Vector psi(2);
  psi << std::cos(0.3), std::sin(0.3);
  State in(std::size_t{1} << w.circuit.width, cd{0, 0});
  in[0] = psi(0);
  in[1] = psi(1);
  simulate(w.circuit, in);

  // extra = 0, sel = 0, ctrl = 0 block: (1/2)(I - i lambda delta V) psi.
  Matrix v = to_dense(model.hamiltonian.terms[0].unit());
  Vector expected = 0.5 * (Matrix::Identity(2, 2) - cd(0, target) * v) * psi;
  CHECK(std::abs(in[0] - expected(0)) < 1e-12);
  CHECK(std::abs(in[1] - expected(1)) < 1e-12);

  // || P0 W Psi ||^2 = (1/4) <Psi'|Psi'> which is about 1/4.
  double good = std::norm(in[0]) + std::norm(in[1]);
  CHECK(good == doctest::Approx(0.25 * expected.squaredNorm() * 4.0)
                    .epsilon(1e-12));
  CHECK(good == doctest::Approx(0.25).epsilon(0.05));
}

TEST_CASE("p^r validity guard") {
  auto model = amplitude_damping();
  auto p = derived_params(model);
  // lambda*delta = 0.2 and r = 8 gives p^r = 0.6^8 < 1/4.
  std::vector<int> indices(8, 1);
  CHECK_THROWS(build_W(indices, model, 0.2 / p.lambda, GadgetForm::Dilated));
  // p = 1 - 1/r keeps p^r > 1/4.
  double ld = 1.0 / 16;
  std::vector<int> ok_indices(8, 1);
  CHECK_NOTHROW(build_W(ok_indices, model, ld / p.lambda,
                        GadgetForm::Dilated));
}

TEST_CASE("dilated and full forms implement matching segment channels") {
  // The amplified good branch is identical by construction; the residual
  // branches differ between the two forms, so the traced channels agree
  // to second order in the per-segment defect r (lambda delta)^2.
  auto model = amplitude_damping();
  auto p = derived_params(model);
  for (double target : {0.05, 0.02}) {
    double delta = target / p.lambda;
    std::vector<int> indices{1, 0};
    Matrix full = algorithm1_segment_channel(indices, model, delta,
                                             GadgetForm::Full);
    Matrix dilated = algorithm1_segment_channel(indices, model, delta,
                                                GadgetForm::Dilated);
    double defect = 2 * target * target;
    CHECK((full - dilated).cwiseAbs().maxCoeff() < 4 * defect * defect);
  }
}

TEST_CASE("lemma 4 deviation matches the contraction oracle") {
  auto model = amplitude_damping();
  auto p = derived_params(model);
  double target = 0.05;
  double delta = target / p.lambda;
  ChannelMixture mix = mixture_distribution(model);
  Philox rng(55, 0);
  Vector psi(2);
  psi << 0.6, 0.8;
  for (int r : {2, 4}) {
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<int> indices(r);
      for (int k = 0; k < r; ++k)
        indices[k] = static_cast<int>(rng.categorical(mix.weights));
      SimulationW w = build_W(indices, model, delta, GadgetForm::Dilated);
      double dev = lemma4_deviation(w, model, delta, psi);
      double oracle = lemma4_deviation_oracle(indices, model, delta, psi);
      CHECK(dev == doctest::Approx(oracle).epsilon(1e-7));
      CHECK(dev <= r * target * target);
    }
  }
}

TEST_CASE("lemma 4 deviation identical for full and dilated forms") {
  auto model = amplitude_damping();
  auto p = derived_params(model);
  double delta = 0.08 / p.lambda;
  Vector psi(2);
  psi << 0.6, 0.8;
  std::vector<int> indices{1, 0};
  SimulationW full = build_W(indices, model, delta, GadgetForm::Full);
  SimulationW dilated = build_W(indices, model, delta, GadgetForm::Dilated);
  double dev_full = lemma4_deviation(full, model, delta, psi);
  double dev_dilated = lemma4_deviation(dilated, model, delta, psi);
  CHECK(dev_full == doctest::Approx(dev_dilated).epsilon(1e-9));
}

TEST_CASE("oaa is near-exact when defects vanish") {
  auto model = amplitude_damping();
  auto p = derived_params(model);
  double delta = 1e-6 / p.lambda;
  Vector psi(2);
  psi << 0.6, 0.8;
  std::vector<int> indices{1, 1, 0, 1};
  SimulationW w = build_W(indices, model, delta, GadgetForm::Dilated);
  CHECK(lemma4_deviation(w, model, delta, psi) <= 1e-11);
}

TEST_CASE("algorithm 1 at t = 0 is the identity") {
  auto model = amplitude_damping();
  Matrix rho0 = Matrix::Zero(2, 2);
  rho0(0, 0) = 1;
  auto result = run_algorithm1(model, 0.0, 0.1, rho0, 3, 1);
  CHECK((result.rho - rho0).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("algorithm 1 approaches the exact channel") {
  auto model = amplitude_damping();
  Matrix rho0 = Matrix::Zero(2, 2);
  rho0(0, 0) = 0.2;
  rho0(1, 1) = 0.8;
  rho0(0, 1) = rho0(1, 0) = 0.3;
  auto result = run_algorithm1(model, 0.5, 0.2, rho0, 60, 5,
                               GadgetForm::Dilated, /*tau=*/2, /*r=*/8);
  Matrix exact = exact_channel(model, 0.5).apply(rho0);
  CHECK(state_trace_distance(result.rho, exact) <= 0.2);
}

TEST_CASE("averaged sampled channels approach the mixture power") {
  auto model = amplitude_damping();
  auto p = derived_params(model);
  int r = 4;
  double target = 0.05;
  double delta = target / p.lambda;
  ChannelMixture mix = mixture_distribution(model);

  Matrix mixture_power = Matrix::Identity(4, 4);
  Matrix single = mixture_channel(model, delta).superop();
  for (int k = 0; k < r; ++k) mixture_power = single * mixture_power;

  Philox rng(77, 0);
  auto averaged_over = [&](int n_samples) {
    Matrix acc = Matrix::Zero(4, 4);
    for (int s = 0; s < n_samples; ++s) {
      std::vector<int> indices(r);
      for (int k = 0; k < r; ++k)
        indices[k] = static_cast<int>(rng.categorical(mix.weights));
      acc += algorithm1_segment_channel(indices, model, delta,
                                        GadgetForm::Dilated);
    }
    return Matrix(acc / n_samples);
  };
  double coarse = choi_distance(
      ChannelRep::from_superop(averaged_over(40)),
      ChannelRep::from_superop(mixture_power));
  double fine = choi_distance(
      ChannelRep::from_superop(averaged_over(400)),
      ChannelRep::from_superop(mixture_power));
  CHECK(fine < coarse);
  CHECK(fine <= r * target * target + 0.1);
}

TEST_CASE("register budget errors carry the arithmetic") {
  auto model = amplitude_damping();
  auto p = derived_params(model);
  std::vector<int> indices(16, 1);
  try {
    build_W(indices, model, 0.002 / p.lambda, GadgetForm::Full);
    CHECK(false);
  } catch (const std::invalid_argument& e) {
    std::string what = e.what();
    CHECK(what.find("cap") != std::string::npos);
    CHECK(what.find("sel") != std::string::npos);
  }
}
