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
#include <variant>
#include <vector>

#include "lindsim/pauli.hpp"

namespace lindsim {

enum class RegisterRole { Selection, Control, State, Extra };

/**
 * A named block of qubits. Qubit q maps to bit (total_width - 1 - q) of a
 * basis index, and a register's value reads its qubits big-endian, so
 * registers hold integers the way the index prints.
 */
struct Register {
  std::string name;
  int offset = 0;
  int width = 0;
  RegisterRole role = RegisterRole::Control;

  int qubit(int k) const { return offset + k; }
};

enum class CmpOp { LT, LE, GT, GE, EQ };

/// Control on a register value: fires when (value <op> bound) holds.
struct RegisterPredicate {
  Register reg;
  CmpOp op = CmpOp::EQ;
  std::uint64_t bound = 0;
};

/// Plain qubit-value control.
struct QubitControl {
  int qubit = 0;
  bool value = true;
};

struct ControlSpec {
  std::vector<QubitControl> qubits;
  std::vector<RegisterPredicate> predicates;
  bool trivial() const { return qubits.empty() && predicates.empty(); }
};

// --- Gate variants ------------------------------------------------------

/// The involutory rotation R_theta = (cos+sin)^{-1/2} [[sqrt(cos),
/// sqrt(sin)], [sqrt(sin), -sqrt(cos)]].
struct RotationGate {
  int qubit = 0;
  double angle = 0.0;
};

Eigen::Matrix2cd rotation_matrix(double angle);

/// Phased Pauli on the target qubits (weight must be 1: gates are unitary).
struct PhasedPauliGate {
  PauliTerm term;
  std::vector<int> targets;
};

/// Applies branches[v] to the targets when the selector register holds v.
struct BinaryMultiplexerGate {
  Register selector;
  std::vector<PauliTerm> branches;
  std::vector<int> targets;
};

/// The completed B unitary: column 0 is the amplitude vector, remaining
/// columns come from deterministic Gram-Schmidt over the canonical basis.
struct StatePrepGate {
  Register reg;
  Matrix unitary;
  bool dagger = false;
};

/// One (register, value) membership constraint of a reflection subspace.
struct SubspaceTerm {
  Register reg;
  std::uint64_t value = 0;
};

/// I - 2P where P projects onto the states matching every term.
struct ReflectionGate {
  std::vector<SubspaceTerm> terms;
};

/// Phase -1 when all listed qubits are 1.
struct MultiControlledZGate {
  std::vector<int> qubits;
};

/**
 * A dense unitary over a list of registers with per-register radix. Basis
 * states where some register value is >= its radix are left untouched, so
 * a 9-valued position register embeds exactly on 4 qubits.
 */
struct DenseUnitaryGate {
  std::vector<Register> regs;
  std::vector<std::uint64_t> radices;
  Matrix matrix;
  bool dagger = false;
};

struct GlobalPhaseGate {
  cd phase{1.0, 0.0};
};

struct Gate {
  std::variant<RotationGate, PhasedPauliGate, BinaryMultiplexerGate,
               StatePrepGate, ReflectionGate, MultiControlledZGate,
               DenseUnitaryGate, GlobalPhaseGate>
      op;
  ControlSpec controls;

  Gate dagger() const;
};

/** A register-addressed gate list simulated on a dense statevector. */
struct Circuit {
  int width = 0;
  std::vector<Register> registers;
  std::vector<Gate> gates;

  Register add_register(const std::string& name, int width_,
                        RegisterRole role);
  void add(Gate g) { gates.push_back(std::move(g)); }
  void append(const Circuit& other);   // same width required
  Circuit inverse() const;

  std::string dump() const;  // one gate per line, for debugging
};

/// Simulator qubit cap; reads LINDSIM_QUBIT_CAP, defaults to 22.
int simulator_qubit_cap();

using State = std::vector<cd>;

State make_basis_state(int width, std::uint64_t index);

/// Applies the gates in order; exact dense evolution.
void simulate(const Circuit& circuit, State& state);
State simulate(const Circuit& circuit, const State& input);

/// Dense matrix of the whole circuit (small widths only, for tests).
Matrix circuit_unitary(const Circuit& circuit);

/// Dense matrix of one gate's local action on its support, controls
/// ignored; used by the unitarity checks.
Matrix gate_local_unitary(const Gate& gate);

/// rho(s,t) over the lowest `n_state` qubits, tracing out the rest.
Matrix trace_out_upper(const State& state, int width, int n_state);

std::uint64_t register_value(std::uint64_t index, int width,
                             const Register& reg);
bool controls_satisfied(const ControlSpec& spec, std::uint64_t index,
                        int width);

/// Deterministic unitary completion of a set of orthonormal leading
/// columns (Gram-Schmidt over the canonical basis, fixed order).
Matrix complete_unitary(const Matrix& leading_columns);

}  // namespace lindsim
