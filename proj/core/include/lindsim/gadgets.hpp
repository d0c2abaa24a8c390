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

#include <cstdint>
#include <vector>

#include "lindsim/channel.hpp"
#include "lindsim/circuit.hpp"
#include "lindsim/model.hpp"
#include "lindsim/trajectory.hpp"

namespace lindsim {

/**
 * Angles of the purification gadgets.
 *
 * The alpha family follows the channel algebra exactly; beta tracks the
 * probability-tuning amount. The tuning itself is realized as one
 * rotation whose 0->0 amplitude is sqrt(p_target / p_raw); its angle
 * relates to beta by tan(tune) = (1 + tan(beta))^2 - 1.
 */
struct GadgetParams {
  double lambda_delta = 0.0;
  double p_target = 0.0;  // 1 - 2*lambda*delta
  // F gadget
  double alpha = 0.0;
  double p1 = 0.0;        // 1/(1+lambda*delta)^2
  double beta1 = 0.0;
  double tune_f = 0.0;
  // E gadget
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double p2 = 0.0;        // 1/(lambda*delta + (1+lambda*delta/2)^2)
  double beta2 = 0.0;
  double tune_e = 0.0;
};

GadgetParams compute_gadget_params(double lambda, double delta);

/**
 * A probabilistic purification: projecting the control block onto zero
 * and tracing the rest yields p * G(rho) for the target channel G.
 */
struct PurificationCircuit {
  Circuit circuit;
  double p = 0.0;           // purification probability
  int channel_index = 0;    // index into the mixture channel list
  int n_kraus = 1;
  Register sel;
  std::vector<Register> ctrl;  // registers that must return to zero
  Register state_reg;
};

/// Gadget for F_l (single Kraus I - i*lambda*delta*V_{0l}).
PurificationCircuit gadget_F(int l, const Lindbladian& L, double delta,
                             double p_target);

/// Gadget for E_j (Kraus pair A_{j0}, A_{j1}); nested LCU over the jump's
/// Pauli terms.
PurificationCircuit gadget_E(int j, const Lindbladian& L, double delta,
                             double p_target);

/// Superoperator implemented on the ctrl = 0 branch (sel and the rest
/// traced); equals p * S(channel) for a valid purification.
Matrix purified_channel_superop(const PurificationCircuit& gadget, int n);

enum class GadgetForm {
  Full,     // the explicit gadget circuits
  Dilated,  // one-ancilla unitary dilation of each gadget's good block
  Auto,     // Full when it fits the qubit cap, else Dilated
};

/**
 * The constant-time simulation circuit W for a fixed index string: r
 * purification gadgets on per-slot selection/control registers plus the
 * extra qubit carrying amplitude p^{-r/2}/2 on |0>.
 */
struct SimulationW {
  Circuit circuit;
  Register extra;
  std::vector<Register> sels;
  std::vector<Register> ctrls;
  Register state_reg;
  std::vector<int> indices;     // channel index per slot
  double p = 0.0;               // common purification probability
  int r = 0;
  int n = 0;
  GadgetForm form = GadgetForm::Full;
};

SimulationW build_W(const std::vector<int>& indices, const Lindbladian& L,
                    double delta, GadgetForm form = GadgetForm::Auto);

/// Reflection subspace constraints for P0 (extra and ctrl zero) and P1
/// (additionally all sel zero).
std::vector<SubspaceTerm> projector_P0(const SimulationW& w);
std::vector<SubspaceTerm> projector_P1(const SimulationW& w);

/// F = -W (I - 2 P1) W^dag (I - 2 P0) W.
Circuit oaa(const SimulationW& w);

/// Same assembly for an arbitrary W circuit and reflection subspaces.
Circuit oaa_circuit(const Circuit& w, const std::vector<SubspaceTerm>& p0,
                    const std::vector<SubspaceTerm>& p1);

/// The target state |Phi> = |0>_extra |0>_ctrl sum_j |j>_sel prod_k A |psi>.
State lemma4_target_state(const SimulationW& w, const Lindbladian& L,
                          double delta, const Vector& psi);

/// || F|Psi> - |Phi> ||_2 measured on the simulated circuit.
double lemma4_deviation(const SimulationW& w, const Lindbladian& L,
                        double delta, const Vector& psi);

/// Independent oracle for the deviation: || (I - M) psi ||_2 with M the
/// nested Kraus contraction of the sampled string (exact identity).
double lemma4_deviation_oracle(const std::vector<int>& indices,
                               const Lindbladian& L, double delta,
                               const Vector& psi);

/// Channel (superoperator on the state register) implemented by a circuit
/// acting on |0...0>_anc (x) rho, tracing all non-state registers.
Matrix traced_channel_superop(const Circuit& circuit, int n_state);

struct Algorithm1Result {
  Matrix rho;
  Matrix stderr_abs;
  Segmentation seg;
  int n_samples = 0;
  GadgetForm form = GadgetForm::Full;
};

/**
 * Circuit-level randomized simulation: per sample draws an index string,
 * builds V_s = F_tau ... F_1, simulates, traces ancillas exactly, and
 * averages over samples. tau/r overrides allow pinning the segmentation.
 */
Algorithm1Result run_algorithm1(const Lindbladian& L, double t, double eps,
                                const Matrix& rho0, int n_samples,
                                std::uint64_t seed,
                                GadgetForm form = GadgetForm::Auto,
                                int tau_override = 0, int r_override = 0);

/// Superoperator of one sampled segment's channel (used by the sampled-
/// channel convergence test).
Matrix algorithm1_segment_channel(const std::vector<int>& indices,
                                  const Lindbladian& L, double delta,
                                  GadgetForm form = GadgetForm::Auto);

}  // namespace lindsim
