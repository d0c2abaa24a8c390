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

#include "lindsim/pauli.hpp"
#include "lindsim/rng.hpp"

using namespace lindsim;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("to_dense basics") {
  PauliTerm identity{{Axis::I}, Phase::Plus, 1.0};
  CHECK(max_abs(to_dense(identity) - Matrix::Identity(2, 2)) < 1e-15);

  PauliTerm half_ix{{Axis::X}, Phase::PlusI, 0.5};
  Matrix expected(2, 2);
  expected << 0, cd(0, 0.5), cd(0, 0.5), 0;
  CHECK(max_abs(to_dense(half_ix) - expected) < 1e-15);

  PauliTerm zz{{Axis::Z, Axis::Z}, Phase::Plus, 2.0};
  Matrix diag = Matrix::Zero(4, 4);
  diag(0, 0) = 2;
  diag(1, 1) = -2;
  diag(2, 2) = -2;
  diag(3, 3) = 2;
  CHECK(max_abs(to_dense(zz) - diag) < 1e-15);
}

TEST_CASE("pauli_norm") {
  PauliSum s(2, {{parse_axes("XI"), Phase::Plus, 0.3},
                 {parse_axes("ZZ"), Phase::Plus, 0.7}});
  CHECK(pauli_norm(s) == doctest::Approx(1.0));
  CHECK(pauli_norm(PauliSum(1, {})) == 0.0);

  // sigma^- = 0.5 X + 0.5 iY
  PauliSum lowering(1, {{{Axis::X}, Phase::Plus, 0.5},
                        {{Axis::Y}, Phase::PlusI, 0.5}});
  CHECK(pauli_norm(lowering) == doctest::Approx(1.0));
  Matrix expected(2, 2);
  expected << 0, 1, 0, 0;
  CHECK(max_abs(lowering.to_dense() - expected) < 1e-15);
}

TEST_CASE("coefficient normalization") {
  auto [w1, p1] = normalize_coefficient(cd(-0.25, 0));
  CHECK(w1 == doctest::Approx(0.25));
  CHECK(p1 == Phase::Minus);
  auto [w2, p2] = normalize_coefficient(cd(0, 0.5));
  CHECK(w2 == doctest::Approx(0.5));
  CHECK(p2 == Phase::PlusI);
  CHECK_THROWS(normalize_coefficient(cd(0.3, 0.4)));
}

TEST_CASE("statevector application matches dense") {
  // X|0> = |1>
  PauliTerm x{{Axis::X}, Phase::Plus, 1.0};
  Vector zero(2);
  zero << 1, 0;
  Vector out = apply_pauli_to_statevector(x, zero);
  CHECK(std::abs(out(1) - cd(1, 0)) < 1e-15);

  // Z|+> = |->
  PauliTerm z{{Axis::Z}, Phase::Plus, 1.0};
  Vector plus(2);
  plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  out = apply_pauli_to_statevector(z, plus);
  CHECK(std::abs(out(0) - plus(0)) < 1e-15);
  CHECK(std::abs(out(1) + plus(1)) < 1e-15);

  // iY on |0> against the dense product.
  PauliTerm iy{{Axis::Y}, Phase::PlusI, 1.0};
  out = apply_pauli_to_statevector(iy, zero);
  Vector dense = to_dense(iy) * zero;
  CHECK((out - dense).norm() < 1e-15);
}

TEST_CASE("random statevector application agrees with dense product") {
  Philox rng(17, 0);
  for (int trial = 0; trial < 50; ++trial) {
    int n = 1 + static_cast<int>(rng.uniform_int(3));
    std::vector<Axis> axes(n);
    for (int k = 0; k < n; ++k)
      axes[k] = static_cast<Axis>(rng.uniform_int(4));
    PauliTerm term{axes, static_cast<Phase>(rng.uniform_int(4)),
                   rng.uniform() + 0.1};
    const Eigen::Index dim = Eigen::Index{1} << n;
    Vector psi(dim);
    for (Eigen::Index k = 0; k < dim; ++k)
      psi(k) = cd(rng.uniform() - 0.5, rng.uniform() - 0.5);
    psi.normalize();
    Vector fast = apply_pauli_to_statevector(term, psi);
    Vector dense = to_dense(term) * psi;
    CHECK((fast - dense).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("pauli_norm dominates the spectral norm") {
  Philox rng(18, 0);
  for (int trial = 0; trial < 100; ++trial) {
    int n = 1 + static_cast<int>(rng.uniform_int(3));
    int terms = 1 + static_cast<int>(rng.uniform_int(4));
    std::vector<PauliTerm> list;
    for (int k = 0; k < terms; ++k) {
      std::vector<Axis> axes(n);
      for (int j = 0; j < n; ++j)
        axes[j] = static_cast<Axis>(rng.uniform_int(4));
      list.push_back({axes, static_cast<Phase>(rng.uniform_int(4)),
                      rng.uniform() + 0.05});
    }
    PauliSum sum(n, std::move(list));
    Eigen::JacobiSVD<Matrix> svd(sum.to_dense());
    CHECK(pauli_norm(sum) >= svd.singularValues().maxCoeff() - 1e-10);
  }
}

TEST_CASE("canonical ordering merges duplicates") {
  PauliSum s(1, {{{Axis::Z}, Phase::Plus, 0.5},
                 {{Axis::X}, Phase::Plus, 0.25},
                 {{Axis::X}, Phase::Plus, 0.25}});
  CHECK(s.size() == 2);
  CHECK(axes_to_string(s.terms[0].axes) == "X");
  CHECK(s.terms[0].weight == doctest::Approx(0.5));
}

TEST_CASE("dimension mismatch rejected") {
  CHECK_THROWS(PauliSum(3, {{parse_axes("XZ"), Phase::Plus, 1.0}}));
  PauliTerm x{{Axis::X}, Phase::Plus, 1.0};
  Vector psi(4);
  psi << 1, 0, 0, 0;
  std::vector<int> bad_target{5};
  Vector out(4);
  CHECK_THROWS(apply_pauli_to_statevector(
      x, std::span<const cd>(psi.data(), 4), std::span<cd>(out.data(), 4), 2,
      bad_target));
}
