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

#include <string>
#include <vector>

#include "lindsim/model.hpp"
#include "lindsim/rng.hpp"

namespace lindsim {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Deterministic random test model: Hermitian Hamiltonian terms, jumps
/// with arbitrary phases, all weights positive.
Lindbladian random_model(Philox& rng, int n, int max_h_terms = 2,
                         int max_jumps = 2, int max_jump_terms = 2);

/// Named invariant suites backing `lindsim verify`.
/// Suites: lemma-channel, gadgets, oaa, structure, cutoff, costs.
std::vector<CheckResult> run_verify_suite(const std::string& name);
std::vector<std::string> verify_suite_names();

}  // namespace lindsim
