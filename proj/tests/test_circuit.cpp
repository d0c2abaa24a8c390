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

#include "lindsim/channel.hpp"
#include "lindsim/circuit.hpp"
#include "lindsim/rng.hpp"

using namespace lindsim;

namespace {

double unitarity_defect(const Matrix& u) {
  return (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols()))
      .cwiseAbs()
      .maxCoeff();
}

// Brute-force oracle: the dense matrix of a gate list computed by naive
// Kronecker embedding, independent of the simulator kernels.
Matrix embed(const Matrix& local, const std::vector<int>& qubits, int width) {
  const Eigen::Index dim = Eigen::Index{1} << width;
  Matrix out = Matrix::Zero(dim, dim);
  const int k = static_cast<int>(qubits.size());
  for (Eigen::Index row = 0; row < dim; ++row) {
    for (Eigen::Index col = 0; col < dim; ++col) {
      Eigen::Index lr = 0, lc = 0;
      bool rest_equal = true;
      std::uint64_t rmask = 0;
      for (int j = 0; j < k; ++j) {
        int bit = width - 1 - qubits[j];
        lr = (lr << 1) | ((row >> bit) & 1);
        lc = (lc << 1) | ((col >> bit) & 1);
        rmask |= std::uint64_t{1} << bit;
      }
      rest_equal = (row & ~rmask) == (col & ~rmask);
      if (rest_equal) out(row, col) = local(lr, lc);
    }
  }
  return out;
}

}  // namespace

TEST_CASE("empty circuit is the identity") {
  Circuit c;
  c.width = 3;
  State s = make_basis_state(3, 5);
  simulate(c, s);
  CHECK(std::abs(s[5] - cd(1, 0)) < 1e-15);
}

TEST_CASE("rotation gate matches its matrix") {
  Circuit c;
  Register q = c.add_register("q", 1, RegisterRole::Control);
  c.add({RotationGate{q.offset, M_PI / 4}, {}});
  Matrix u = circuit_unitary(c);
  CHECK((u - rotation_matrix(M_PI / 4).cast<cd>()).cwiseAbs().maxCoeff() <
        1e-14);
  CHECK(unitarity_defect(u) < 1e-12);
  // R is an involution.
  CHECK((u * u - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("every gate variant is unitary") {
  Philox rng(71, 0);
  // Rotation
  CHECK(unitarity_defect(gate_local_unitary(
            {RotationGate{0, 0.3}, {}})) < 1e-12);
  // Phased Pauli
  CHECK(unitarity_defect(gate_local_unitary(
            {PhasedPauliGate{{{Axis::X, Axis::Y}, Phase::MinusI, 1.0}, {0, 1}},
             {}})) < 1e-12);
  // Binary multiplexer
  Register sel{"sel", 0, 2, RegisterRole::Selection};
  std::vector<PauliTerm> branches{{{Axis::X}, Phase::Plus, 1.0},
                                  {{Axis::Y}, Phase::PlusI, 1.0},
                                  {{Axis::Z}, Phase::Minus, 1.0}};
  CHECK(unitarity_defect(gate_local_unitary(
            {BinaryMultiplexerGate{sel, branches, {2}}, {}})) < 1e-12);
  // State prep from a random column
  Register reg{"b", 0, 2, RegisterRole::Control};
  Matrix col(4, 1);
  for (int k = 0; k < 4; ++k)
    col(k, 0) = cd(rng.uniform() - 0.5, rng.uniform() - 0.5);
  col /= col.norm();
  Matrix completed = complete_unitary(col);
  CHECK(unitarity_defect(completed) < 1e-12);
  CHECK(unitarity_defect(gate_local_unitary(
            {StatePrepGate{reg, completed, false}, {}})) < 1e-12);
  // Reflection
  CHECK(unitarity_defect(gate_local_unitary(
            {ReflectionGate{{{reg, 2}}}, {}})) < 1e-12);
  // Multi-controlled Z
  CHECK(unitarity_defect(gate_local_unitary(
            {MultiControlledZGate{{0, 1, 2}}, {}})) < 1e-12);
  // Dense unitary through a mixed-radix register (radix 3 on 2 qubits)
  Matrix haar = complete_unitary(col);
  Register trit{"t", 0, 2, RegisterRole::Control};
  Matrix u3 = haar.block(0, 0, 3, 3);
  // Re-orthonormalize the 3x3 block.
  Eigen::JacobiSVD<Matrix> svd(u3, Eigen::ComputeFullU | Eigen::ComputeFullV);
  u3 = svd.matrixU() * svd.matrixV().adjoint();
  Matrix dense = gate_local_unitary(
      {DenseUnitaryGate{{trit}, {3}, u3, false}, {}});
  CHECK(unitarity_defect(dense) < 1e-12);
  // Value 3 (outside the radix) stays untouched.
  CHECK(std::abs(dense(3, 3) - cd(1, 0)) < 1e-15);
}

TEST_CASE("random circuits match the Kronecker oracle") {
  Philox rng(72, 0);
  for (int trial = 0; trial < 8; ++trial) {
    const int width = 6;
    Circuit c;
    c.width = width;
    Matrix reference = Matrix::Identity(64, 64);
    for (int g = 0; g < 10; ++g) {
      int kind = static_cast<int>(rng.uniform_int(3));
      if (kind == 0) {
        int q = static_cast<int>(rng.uniform_int(width));
        double angle = rng.uniform() * 1.2;
        c.add({RotationGate{q, angle}, {}});
        reference =
            embed(rotation_matrix(angle).cast<cd>(), {q}, width) * reference;
      } else if (kind == 1) {
        int q = static_cast<int>(rng.uniform_int(width - 1));
        PauliTerm term{{static_cast<Axis>(1 + rng.uniform_int(3)),
                        static_cast<Axis>(1 + rng.uniform_int(3))},
                       static_cast<Phase>(rng.uniform_int(4)),
                       1.0};
        c.add({PhasedPauliGate{term, {q, q + 1}}, {}});
        reference = embed(to_dense(term), {q, q + 1}, width) * reference;
      } else {
        // Controlled phased Pauli: control on qubit 0, target on 3.
        PauliTerm term{{Axis::X}, Phase::Plus, 1.0};
        Gate gate{PhasedPauliGate{term, {3}}, {}};
        gate.controls.qubits.push_back({0, true});
        c.add(gate);
        Matrix local = Matrix::Identity(4, 4);
        local.block(2, 2, 2, 2) = to_dense(term);
        reference = embed(local, {0, 3}, width) * reference;
      }
    }
    CHECK((circuit_unitary(c) - reference).cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("circuit inverse really inverts") {
  Philox rng(73, 0);
  Circuit c;
  c.width = 4;
  Register reg{"b", 1, 2, RegisterRole::Control};
  Matrix col(4, 1);
  for (int k = 0; k < 4; ++k)
    col(k, 0) = cd(rng.uniform() - 0.5, rng.uniform() - 0.5);
  col /= col.norm();
  c.add({RotationGate{0, 0.7}, {}});
  c.add({StatePrepGate{reg, complete_unitary(col), false}, {}});
  c.add({PhasedPauliGate{{{Axis::Y}, Phase::PlusI, 1.0}, {3}},
         {{{0, true}}, {}}});
  c.add({ReflectionGate{{{reg, 1}}}, {}});
  Circuit round_trip = c;
  round_trip.append(c.inverse());
  Matrix u = circuit_unitary(round_trip);
  CHECK((u - Matrix::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("register predicates select values") {
  Circuit c;
  Register sel = c.add_register("sel", 2, RegisterRole::Selection);
  Register target = c.add_register("t", 1, RegisterRole::State);
  Gate flip{PhasedPauliGate{{{Axis::X}, Phase::Plus, 1.0},
                            {target.offset}},
            {}};
  flip.controls.predicates.push_back({sel, CmpOp::LE, 1});
  c.add(flip);
  // sel = 1 (<= 1): flips. sel = 2: does not.
  State s = make_basis_state(3, 0b010);
  simulate(c, s);
  CHECK(std::abs(s[0b011] - cd(1, 0)) < 1e-15);
  s = make_basis_state(3, 0b100);
  simulate(c, s);
  CHECK(std::abs(s[0b100] - cd(1, 0)) < 1e-15);
}

TEST_CASE("trace_out_upper produces the reduced state") {
  // Bell pair over 2 qubits; tracing the top qubit leaves I/2.
  State s(4, cd{0, 0});
  s[0b00] = 1 / std::sqrt(2.0);
  s[0b11] = 1 / std::sqrt(2.0);
  Matrix rho = trace_out_upper(s, 2, 1);
  CHECK((rho - Matrix::Identity(2, 2) / 2).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("width cap is enforced with an actionable message") {
  Circuit c;
  c.width = simulator_qubit_cap() + 1;
  State s;
  CHECK_THROWS_WITH_AS(simulate(c, s), doctest::Contains("LINDSIM_QUBIT_CAP"),
                       std::invalid_argument);
}

TEST_CASE("dump lists one gate per line") {
  Circuit c;
  Register q = c.add_register("q", 1, RegisterRole::Control);
  c.add({RotationGate{q.offset, 0.5}, {}});
  Gate flip{PhasedPauliGate{{{Axis::X}, Phase::Plus, 1.0}, {0}}, {}};
  flip.controls.qubits.push_back({0, true});
  c.add(flip);
  auto text = c.dump();
  CHECK(text.find("rotation") != std::string::npos);
  CHECK(text.find("pauli X") != std::string::npos);
  CHECK(std::count(text.begin(), text.end(), '\n') == 2);
}
