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

#include <vector>

#include "lindsim/channel.hpp"
#include "lindsim/circuit.hpp"
#include "lindsim/gadgets.hpp"
#include "lindsim/model.hpp"

namespace lindsim {

/**
 * One mixture slot factored per the structure condition: selection
 * preparation G, control preparation V_p, multiplexed unitary V_c and the
 * closing V_p^dag. Channel indices live on sel1 (values < q0 are the
 * Hamiltonian channels, q0 + j the jump channels); sel2 carries the jump
 * Kraus branch.
 */
struct StructuredPurification {
  Circuit slot;      // G, V_p, V_c, V_p^dag over [sel|ctrl|state]
  Circuit g_part, vp_part, vc_part;  // the individual factors
  Register sel1, sel2, c1, c2, anc1, anc2;
  Register sel_block, ctrl_block, state_reg;
  int anc_w = 0;     // per-jump ancilla width (max over jumps)
  int anc_width_total = 0;  // sel + ctrl widths (state excluded)

  GadgetParams params;
  std::vector<double> mixture;  // Pr per channel index
  int q0 = 0;                   // Hamiltonian channel count
  int m = 0;                    // jump channel count
  double p_I = 0.0;             // weight of the trivial subspace
  double lambda_star = 0.0;     // nontrivial amplitude, p_I + lambda_*^2 = 1
  double p_bar = 0.0;           // mean raw purification probability
  Vector prep;                  // V_p (G (x) I) |0> on the ancilla space
  Vector chi;                   // (I - P_I) prep / lambda_*
};

StructuredPurification build_structured_purification(const Lindbladian& L,
                                                     double delta);

/// The trivial-subspace projector (sel2 = 0 and ctrl1 = 0) on the slot's
/// ancilla space, as a diagonal mask.
std::vector<bool> trivial_subspace_mask(const StructuredPurification& sp);

/// Per-channel gadget bodies combined behind a selection preparation: the
/// unfactored reference circuit the structure condition rearranges.
Circuit direct_mixture_purification(const Lindbladian& L, double delta);

/** The modified preparations G' and V'_p of the encoded rotation. */
struct EncodedPreparation {
  Vector g_prime_column;   // amplitudes on the (sel1, sel2) register
  Circuit vp_prime;        // slot-local V'_p over the ancilla registers
  Vector prepared;         // V'_p (G' (x) I) |0,0>
  double lambda_star = 0.0;
};

EncodedPreparation build_G_prime_Vp_prime(const Lindbladian& L,
                                          const StructuredPurification& sp);

/** The standard encoded rotation operator on the position registers. */
struct EncodedRotation {
  int r = 0;
  int h = 0;
  double amp_trivial = 0.0;     // per-slot trivial amplitude
  double amp_nontrivial = 0.0;
  Matrix e_std;                 // (r+1)^h unitary, completed column
  double eps_enc = 0.0;         // achieved encoding error
  double tail = 0.0;            // dropped binomial weight
};

/// Standard parametrization: per-slot state R_{arctan(1/r)} |0>.
EncodedRotation build_E_std(int r, int h);
EncodedRotation build_E_std(int r, int h, double amp_trivial,
                            double amp_nontrivial);

/// Encoding error of a candidate E against the weight-h encoding of the
/// product state with the given amplitudes (norm of the defect).
double encoded_rotation_error(const EncodedRotation& enc);

/**
 * Uncompressed reference: the amplified segment built from r structured
 * slots (small r only — every slot carries its own registers).
 */
Matrix structured_segment_channel_uncompressed(const Lindbladian& L,
                                               double delta, int r);

/// Compressed segment channel evaluated gate-by-gate on the dense
/// simulator (tiny instances; validates the compressed engine).
Matrix algorithm2_segment_channel_dense(const Lindbladian& L, double delta,
                                        int r, int h);

/// Compressed segment channel in the correlated-support representation
/// (position registers dense, slot spaces in an adaptive basis); this is
/// the production path and handles r = 8, h = 3.
Matrix algorithm2_segment_channel(const Lindbladian& L, double delta, int r,
                                  int h);

struct Algorithm2Result {
  Matrix rho;
  Segmentation seg;
  int h = 0;
  double eps_enc = 0.0;
  double tail = 0.0;
  Matrix segment_superop;
};

/**
 * Compressed-LCU simulation: tau amplified segments, each the Hamming-
 * weight-cutoff circuit with h compressed slots. h defaults to the
 * smallest value whose predicted encoding error is at most eps/(2 tau),
 * capped by the full weight and the engine cap of 3.
 */
Algorithm2Result run_algorithm2(const Lindbladian& L, double t, double eps,
                                const Matrix& rho0, int h_override = 0,
                                int tau_override = 0, int r_override = 0);

}  // namespace lindsim
