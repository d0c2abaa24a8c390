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
#include "lindsim/model.hpp"

namespace lindsim {

/**
 * One individual channel of the short-time mixture: either F_l with the
 * single Kraus operator I - i*lambda*delta*V_{0l}, or E_j with Kraus pair
 * { I - (lambda*delta / 2 c_j^2) L_j^dag L_j, sqrt(lambda*delta)/c_j L_j }.
 */
struct IndividualChannel {
  enum class Kind { Hamiltonian, Jump };
  Kind kind;
  int index;                   // l or j within its family
  std::vector<Matrix> kraus;
  double trace_defect;         // || sum A^dag A - I ||_op, <= (lambda*delta)^2
};

std::vector<IndividualChannel> build_individual_channels(const Lindbladian& L,
                                                         double delta);

/// The convex mixture E = sum_l (T_{0l}/lambda) F_l + sum_j (c_j^2/lambda) E_j.
ChannelRep mixture_channel(const Lindbladian& L, double delta);

/**
 * Max-abs residual of S(E) - S(I + delta*Lv) - lambda*delta^2 * S(R), where
 * R(rho) = sum_l T_{0l} V rho V + (1/4) sum_j (L^dag L) rho (L^dag L)/c_j^2.
 * This is an exact algebraic identity, so the residual is machine noise.
 */
double remainder_identity_check(const Lindbladian& L, double delta);

/** Time-segmentation shared by all backends. */
struct Segmentation {
  int tau = 0;      // ceil(2 * lambda * t)
  int r = 0;        // 2^ceil(log2(tau / eps)), at least 1
  double delta = 0.0;
  int steps() const { return tau * r; }
};

Segmentation make_segmentation(double lambda, double t, double eps);

struct ChannelEvolveResult {
  Matrix rho;
  double trace_defect;  // |tr(rho) - 1| accumulated over the run
  Segmentation seg;
};

/// Applies the deterministic mixture channel tau*r times with
/// delta = t/(tau*r). No renormalization during evolution.
ChannelEvolveResult evolve_channel_level(const Lindbladian& L, double t,
                                         double eps, const Matrix& rho0);

/// Raw one-step branch weights: p_0 = ||(I - i delta H_eff) psi||^2 and
/// p_j = delta ||L_j psi||^2. Sampling normalizes over these.
std::vector<double> trajectory_step_probabilities(const Lindbladian& L,
                                                  const Vector& psi,
                                                  double delta);

struct MonteCarloResult {
  Matrix rho;          // averaged projector
  Matrix stderr_abs;   // per-entry standard error (real magnitude)
  Segmentation seg;
  std::uint64_t n_traj = 0;
};

/// First-order Monte Carlo wavefunction method; trajectories use Philox
/// substream (seed, trajectory index), so results are seed-reproducible.
MonteCarloResult evolve_monte_carlo(const Lindbladian& L, double t, double eps,
                                    const Vector& psi0, std::uint64_t n_traj,
                                    std::uint64_t seed);

}  // namespace lindsim
