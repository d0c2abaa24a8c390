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
#include <string>
#include <vector>

#include "lindsim/circuit.hpp"
#include "lindsim/model.hpp"
#include "lindsim/trajectory.hpp"

namespace lindsim {

/** Inputs of a cost evaluation. */
struct CostParams {
  int n = 1;
  int q = 1;    // max Pauli term count over H and jumps
  int q0 = 1;   // Hamiltonian term count
  int m = 1;    // number of jumps
  double t = 1.0;
  double eps = 0.1;
  int tau = 0;  // derived from (lambda, t) when zero
  int r = 0;
  int h = 0;
  double lambda = 1.0;
};

/// Fills tau/r (and h for the compressed algorithm) from the segmentation
/// rules when unset.
CostParams resolve_cost_params(CostParams p, bool with_cutoff);

struct CostReport {
  std::string algorithm;
  CostParams params;
  std::vector<std::pair<std::string, long long>> components;
  long long total = 0;

  long long component(const std::string& name) const;
};

/**
 * Concrete gate count of Algorithm 1 under the project's decomposition
 * policy (each multiplexer branch is one controlled phased Pauli, state
 * preparations cost 2^width, reflections cost their control width). The
 * count never references m: jump gadgets are priced by q and n alone.
 */
CostReport count_alg1(const CostParams& params);

/// Same, for a concrete sampled index string (slot costs depend only on
/// which channel kind occupies the slot, never on m).
CostReport count_alg1_for_string(const CostParams& params,
                                 const std::vector<int>& indices);

/// Concrete per-component counts for Algorithm 2 (compressed LCU).
CostReport count_alg2(const CostParams& params);

/// Arithmetic envelope of the channel-LCU scheme, for ratio comparisons
/// only; no circuit is built.
double count_cw16_formula(const CostParams& params);

/// Gate tally of a built circuit under the same decomposition policy.
long long concrete_gate_count(const Circuit& circuit);

/// CSV header + row emission for sweep outputs.
std::string cost_csv_header();
std::string cost_csv_row(const CostReport& report, double cw16);

}  // namespace lindsim
