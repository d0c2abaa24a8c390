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

#include "lindsim/verify.hpp"

#include <cmath>
#include <sstream>

#include "lindsim/channel.hpp"
#include "lindsim/compressed.hpp"
#include "lindsim/cost.hpp"
#include "lindsim/gadgets.hpp"
#include "lindsim/trajectory.hpp"

namespace lindsim {

namespace {

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << x;
  return os.str();
}

void check(std::vector<CheckResult>& out, const std::string& name, bool pass,
           const std::string& detail) {
  out.push_back({name, pass, detail});
}

std::vector<Lindbladian> standard_models(int count, std::uint64_t seed) {
  Philox rng(seed, 0);
  std::vector<Lindbladian> models;
  for (int k = 0; k < count; ++k) models.push_back(random_model(rng, 1 + k % 2));
  return models;
}

Lindbladian amplitude_damping() {
  PauliSum h(1, {{{Axis::Z}, Phase::Plus, 0.5}});
  PauliSum jump(1, {{{Axis::X}, Phase::Plus, 0.5}, {{Axis::Y}, Phase::PlusI, 0.5}});
  return Lindbladian(1, std::move(h), {std::move(jump)});
}

std::vector<CheckResult> suite_lemma_channel() {
  std::vector<CheckResult> out;
  auto models = standard_models(10, 11);
  models.push_back(scenario_depolarizing(1));
  models.push_back(scenario_xy(2, -1.0, Topology::FullyConnected));

  double worst_residual = 0, worst_mix = 0, worst_first = 0;
  for (const auto& model : models) {
    DerivedParams p = derived_params(model);
    for (double target : {0.2, 0.1, 0.05, 0.01}) {
      double delta = target / p.lambda;
      worst_residual =
          std::max(worst_residual, remainder_identity_check(model, delta));
      ChannelRep exact = exact_channel(model, delta);
      double mix_gap =
          choi_distance(mixture_channel(model, delta), exact) /
          (5.0 * target * target);
      double first_gap =
          choi_distance(first_order_map(model, delta), exact) /
          (4.0 * target * target);
      worst_mix = std::max(worst_mix, mix_gap);
      worst_first = std::max(worst_first, first_gap);
    }
  }
  check(out, "remainder-identity", worst_residual <= 1e-11,
        "max residual " + fmt(worst_residual));
  check(out, "mixture-bound-5(ld)^2", worst_mix <= 1.0,
        "worst ratio " + fmt(worst_mix));
  check(out, "first-order-bound-(2ld)^2", worst_first <= 1.0,
        "worst ratio " + fmt(worst_first));
  return out;
}

std::vector<CheckResult> suite_gadgets() {
  std::vector<CheckResult> out;
  std::vector<Lindbladian> models{scenario_depolarizing(1),
                                  scenario_xy(2, -1.0,
                                              Topology::FullyConnected)};
  double worst = 0;
  for (const auto& model : models) {
    DerivedParams p = derived_params(model);
    auto channels = build_individual_channels(model, 0.2 / p.lambda);
    for (double target : {0.2, 0.1, 0.01}) {
      double delta = target / p.lambda;
      double p_goal = 1.0 - 2.0 * target;
      channels = build_individual_channels(model, delta);
      for (std::size_t idx = 0; idx < channels.size(); ++idx) {
        PurificationCircuit gadget =
            idx < static_cast<std::size_t>(p.q0)
                ? gadget_F(static_cast<int>(idx), model, delta, p_goal)
                : gadget_E(static_cast<int>(idx) - p.q0, model, delta, p_goal);
        Matrix implemented = purified_channel_superop(gadget, model.n);
        Matrix expected = p_goal * kraus_to_superop(channels[idx].kraus);
        worst = std::max(worst,
                         (implemented - expected).cwiseAbs().maxCoeff());
      }
    }
  }
  check(out, "gadget-purification-contract", worst <= 1e-10,
        "max |implemented - p*G| " + fmt(worst));
  return out;
}

std::vector<CheckResult> suite_oaa() {
  std::vector<CheckResult> out;
  Lindbladian model = amplitude_damping();
  DerivedParams p = derived_params(model);
  ChannelMixture mix = mixture_distribution(model);
  double target = 0.05;
  double delta = target / p.lambda;

  Philox rng(404, 0);
  double worst_ratio = 0, worst_oracle_gap = 0;
  for (int r : {4, 8}) {
    double bound = r * target * target;
    for (int trial = 0; trial < 25; ++trial) {
      std::vector<int> indices(r);
      for (int k = 0; k < r; ++k)
        indices[k] = static_cast<int>(rng.categorical(mix.weights));
      Vector psi(2);
      psi << std::cos(0.3 + 0.1 * trial), std::sin(0.3 + 0.1 * trial);
      SimulationW w = build_W(indices, model, delta, GadgetForm::Dilated);
      double dev = lemma4_deviation(w, model, delta, psi);
      double oracle = lemma4_deviation_oracle(indices, model, delta, psi);
      worst_ratio = std::max(worst_ratio, dev / bound);
      worst_oracle_gap = std::max(worst_oracle_gap, std::abs(dev - oracle));
    }
  }
  check(out, "oaa-deviation-bound", worst_ratio <= 1.0,
        "worst dev/bound " + fmt(worst_ratio));
  check(out, "oaa-oracle-identity", worst_oracle_gap <= 1e-9,
        "max |circuit - oracle| " + fmt(worst_oracle_gap));
  return out;
}

std::vector<CheckResult> suite_structure() {
  std::vector<CheckResult> out;
  std::vector<Lindbladian> models{amplitude_damping(),
                                  scenario_depolarizing(1)};
  double worst_eq = 0, worst_pi = 0, worst_norm = 0;
  for (const auto& model : models) {
    DerivedParams p = derived_params(model);
    for (int r : {4, 8, 16}) {
      double delta = 1.0 / (r * p.lambda);
      StructuredPurification sp = build_structured_purification(model, delta);
      worst_pi = std::max(worst_pi, (1.0 - 1.5 / r) - sp.p_I);
      worst_norm = std::max(
          worst_norm,
          std::abs(sp.p_I + sp.lambda_star * sp.lambda_star - 1.0));
    }
    double delta = 0.1 / p.lambda;
    Matrix u_structured = circuit_unitary(
        build_structured_purification(model, delta).slot);
    Matrix u_direct = circuit_unitary(direct_mixture_purification(model, delta));
    worst_eq =
        std::max(worst_eq, (u_structured - u_direct).cwiseAbs().maxCoeff());
  }
  check(out, "structured-equals-direct", worst_eq <= 1e-10,
        "max |U_fig13 - U_direct| " + fmt(worst_eq));
  check(out, "p_I-bound", worst_pi <= 0.0,
        "worst (1-3/2r) - p_I " + fmt(worst_pi));
  check(out, "p_I-plus-lambda*^2", worst_norm <= 1e-12,
        "max |p_I + l*^2 - 1| " + fmt(worst_norm));
  return out;
}

std::vector<CheckResult> suite_cutoff() {
  std::vector<CheckResult> out;
  EncodedRotation e2 = build_E_std(8, 2);
  EncodedRotation e3 = build_E_std(8, 3);
  check(out, "eps_enc-monotone", e3.eps_enc < e2.eps_enc,
        "eps(3) " + fmt(e3.eps_enc) + " vs eps(2) " + fmt(e2.eps_enc));

  Lindbladian model = amplitude_damping();
  DerivedParams p = derived_params(model);
  double delta = 1.0 / (4 * p.lambda);  // lambda*delta = 1/(2r) at r = 2
  Matrix uncompressed = structured_segment_channel_uncompressed(model, delta, 2);
  Matrix compressed = algorithm2_segment_channel(model, delta, 2, 2);
  double gap = (uncompressed - compressed).cwiseAbs().maxCoeff();
  check(out, "compressed-equals-uncompressed", gap <= 1e-8,
        "max superop gap " + fmt(gap));
  return out;
}

std::vector<CheckResult> suite_costs() {
  std::vector<CheckResult> out;
  CostParams base{.n = 2, .q = 4, .q0 = 2, .m = 2, .t = 2.0, .eps = 0.1,
                  .tau = 0, .r = 0, .h = 0, .lambda = 2.0};
  long long first = count_alg1(base).total;
  bool invariant = true;
  for (int m : {4, 8, 16}) {
    CostParams varied = base;
    varied.m = m;
    invariant = invariant && count_alg1(varied).total == first;
  }
  check(out, "alg1-m-invariance", invariant, "totals equal across m sweep");

  double lo = 1e300, hi = 0;
  for (int f : {1, 2, 4, 8, 16}) {
    CostParams varied = base;
    varied.m = base.m * f;
    double per_mq = static_cast<double>(count_alg2(varied).total) /
                    (static_cast<double>(varied.m) * varied.q);
    lo = std::min(lo, per_mq);
    hi = std::max(hi, per_mq);
  }
  check(out, "alg2-per-mq-bounded", hi / lo <= 4.0,
        "spread " + fmt(hi / lo));

  double prev = 1e300;
  bool declining = true;
  for (int n = 2; n <= 6; ++n) {
    CostParams xy;
    xy.n = n;
    xy.m = n;
    xy.q = n * (n - 1);
    xy.q0 = n * (n - 1);
    xy.t = n;
    xy.eps = 0.5;
    xy.lambda = static_cast<double>(n) * n;
    double ratio = static_cast<double>(count_alg2(xy).total) /
                   count_cw16_formula(xy);
    declining = declining && ratio < prev;
    prev = ratio;
  }
  check(out, "alg2-vs-cw16-declining", declining, "ratio falls with n");
  return out;
}

}  // namespace

Lindbladian random_model(Philox& rng, int n, int max_h_terms, int max_jumps,
                         int max_jump_terms) {
  auto random_axes = [&](bool nontrivial) {
    std::vector<Axis> axes(n);
    for (;;) {
      bool all_identity = true;
      for (int k = 0; k < n; ++k) {
        axes[k] = static_cast<Axis>(rng.uniform_int(4));
        all_identity = all_identity && axes[k] == Axis::I;
      }
      if (!nontrivial || !all_identity) return axes;
    }
  };

  int n_h = 1 + static_cast<int>(rng.uniform_int(max_h_terms));
  std::vector<PauliTerm> h_terms;
  for (int k = 0; k < n_h; ++k) {
    Phase phase = rng.uniform() < 0.5 ? Phase::Plus : Phase::Minus;
    h_terms.push_back({random_axes(true), phase, 0.1 + 0.9 * rng.uniform()});
  }

  int n_jumps = 1 + static_cast<int>(rng.uniform_int(max_jumps));
  std::vector<PauliSum> jumps;
  for (int j = 0; j < n_jumps; ++j) {
    int n_terms = 1 + static_cast<int>(rng.uniform_int(max_jump_terms));
    std::vector<PauliTerm> terms;
    for (int k = 0; k < n_terms; ++k) {
      Phase phase = static_cast<Phase>(rng.uniform_int(4));
      terms.push_back({random_axes(false), phase, 0.1 + 0.9 * rng.uniform()});
    }
    jumps.push_back(PauliSum(n, std::move(terms)));
  }
  return Lindbladian(n, PauliSum(n, std::move(h_terms)), std::move(jumps));
}

std::vector<std::string> verify_suite_names() {
  return {"lemma-channel", "gadgets", "oaa", "structure", "cutoff", "costs"};
}

std::vector<CheckResult> run_verify_suite(const std::string& name) {
  if (name == "lemma-channel") return suite_lemma_channel();
  if (name == "gadgets") return suite_gadgets();
  if (name == "oaa") return suite_oaa();
  if (name == "structure") return suite_structure();
  if (name == "cutoff") return suite_cutoff();
  if (name == "costs") return suite_costs();
  throw std::invalid_argument("unknown verification suite \"" + name + "\"");
}

}  // namespace lindsim
