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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lindsim/pauli.hpp"

namespace lindsim {

/**
 * A Lindbladian: Hamiltonian plus jump operators, all as Pauli sums.
 *
 * Hamiltonian terms must carry real phases (+1/-1) so each term is
 * Hermitian; jump operators may use the imaginary phases (sigma^- needs
 * them). Jumps with zero Pauli norm are dropped at construction.
 */
struct Lindbladian {
  int n = 0;
  PauliSum hamiltonian;
  std::vector<PauliSum> jumps;

  Lindbladian() = default;
  Lindbladian(int n_, PauliSum h, std::vector<PauliSum> jumps_);

  std::size_t num_jumps() const { return jumps.size(); }

  /// Names of jumps dropped because their Pauli norm vanished.
  std::vector<std::string> dropped_jumps;
};

/** Norms and counts derived from a Lindbladian. */
struct DerivedParams {
  double lambda = 0.0;          // ||H||_pauli + sum c_j^2
  std::vector<double> c;        // c_j = ||L_j||_pauli
  int q = 0;                    // max term count over H and jumps
  int q0 = 0;                   // Hamiltonian term count
  int m = 0;                    // number of jumps
};

DerivedParams derived_params(const Lindbladian& L);

/**
 * Sampling distribution over the individual channels: q0 Hamiltonian
 * channels with weight T_{0l}/lambda followed by m jump channels with
 * weight c_j^2/lambda.
 */
struct ChannelMixture {
  std::vector<double> weights;      // length q0 + m, sums to 1
  int q0 = 0;
  int m = 0;

  std::size_t size() const { return weights.size(); }
  bool is_hamiltonian_channel(std::size_t idx) const {
    return idx < static_cast<std::size_t>(q0);
  }
};

ChannelMixture mixture_distribution(const Lindbladian& L);

/// Error for malformed model documents; carries a 1-based line number
/// when the failure is a syntax error.
struct ModelParseError : std::runtime_error {
  explicit ModelParseError(const std::string& what, int line_number = -1)
      : std::runtime_error(what), line(line_number) {}
  int line;
};

/// Parse the JSON model document (see README for the schema).
Lindbladian parse_model(const std::string& text);
std::string serialize_model(const Lindbladian& L);

/// Depolarizing dissipator: 4^n jumps {P / 2^n}, optional Hamiltonian.
Lindbladian scenario_depolarizing(
    int n, std::optional<PauliSum> hamiltonian = std::nullopt);

enum class Topology { FullyConnected, Chain };

/// Dissipative XY model: H = -J sum (X_i X_j + Y_i Y_j), jumps {Z_i}.
Lindbladian scenario_xy(int n, double J, Topology topology);

/// Collective lowering: jump sqrt(gamma_S) prod_{i in S} sigma_i^- per
/// nonempty subset S (qubit indices are 0-based).
Lindbladian scenario_collective_lowering(
    int n, const std::map<std::vector<int>, double>& rates);

}  // namespace lindsim
