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

#include <benchmark/benchmark.h>

#include "lindsim/channel.hpp"
#include "lindsim/compressed.hpp"
#include "lindsim/gadgets.hpp"
#include "lindsim/rng.hpp"
#include "lindsim/trajectory.hpp"

using namespace lindsim;

namespace {

Lindbladian amplitude_damping() {
  PauliSum h(1, {{{Axis::Z}, Phase::Plus, 0.5}});
  PauliSum jump(1, {{{Axis::X}, Phase::Plus, 0.5},
                    {{Axis::Y}, Phase::PlusI, 0.5}});
  return Lindbladian(1, std::move(h), {std::move(jump)});
}

void BM_pauli_statevector_kernel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<Axis> axes(n);
  for (int k = 0; k < n; ++k) axes[k] = k % 2 ? Axis::X : Axis::Z;
  PauliTerm term{axes, Phase::PlusI, 1.0};
  Vector psi = Vector::Ones(Eigen::Index{1} << n).normalized();
  for (auto _ : state) {
    Vector out = apply_pauli_to_statevector(term, psi);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * (int64_t{1} << n));
}
BENCHMARK(BM_pauli_statevector_kernel)->Arg(10)->Arg(16);

void BM_exact_channel(benchmark::State& state) {
  auto model = scenario_xy(static_cast<int>(state.range(0)), -1.0,
                           Topology::FullyConnected);
  for (auto _ : state) {
    auto channel = exact_channel(model, 0.5);
    benchmark::DoNotOptimize(channel.superop().data());
  }
}
BENCHMARK(BM_exact_channel)->Arg(2)->Arg(3);

void BM_mixture_superop(benchmark::State& state) {
  auto model = scenario_depolarizing(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto channel = mixture_channel(model, 0.01);
    benchmark::DoNotOptimize(channel.superop().data());
  }
}
BENCHMARK(BM_mixture_superop)->Arg(1)->Arg(2);

void BM_alg1_segment(benchmark::State& state) {
  auto model = amplitude_damping();
  auto p = derived_params(model);
  const int r = static_cast<int>(state.range(0));
  double delta = 1.0 / (2.0 * r * p.lambda);
  std::vector<int> indices(r, 1);
  for (auto _ : state) {
    Matrix seg =
        algorithm1_segment_channel(indices, model, delta, GadgetForm::Dilated);
    benchmark::DoNotOptimize(seg.data());
  }
}
BENCHMARK(BM_alg1_segment)->Arg(4)->Arg(8);

void BM_alg2_segment(benchmark::State& state) {
  auto model = amplitude_damping();
  auto p = derived_params(model);
  const int r = 8, h = static_cast<int>(state.range(0));
  double delta = 1.0 / (2.0 * r * p.lambda);
  for (auto _ : state) {
    Matrix seg = algorithm2_segment_channel(model, delta, r, h);
    benchmark::DoNotOptimize(seg.data());
  }
}
BENCHMARK(BM_alg2_segment)->Arg(2)->Arg(3);

void BM_monte_carlo(benchmark::State& state) {
  auto model = amplitude_damping();
  Vector one(2);
  one << 0, 1;
  for (auto _ : state) {
    auto result =
        evolve_monte_carlo(model, 1.0, 0.1, one,
                           static_cast<std::uint64_t>(state.range(0)), 5);
    benchmark::DoNotOptimize(result.rho.data());
  }
}
BENCHMARK(BM_monte_carlo)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
