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

#include "lindsim/circuit.hpp"

#include <bit>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace lindsim {

Eigen::Matrix2cd rotation_matrix(double angle) {
  double c = std::cos(angle), s = std::sin(angle);
  if (c < 0 || s < 0)
    throw std::invalid_argument("rotation angle must lie in [0, pi/2]");
  double norm = 1.0 / std::sqrt(c + s);
  Eigen::Matrix2cd m;
  m << norm * std::sqrt(c), norm * std::sqrt(s), norm * std::sqrt(s),
      -norm * std::sqrt(c);
  return m;
}

Gate Gate::dagger() const {
  Gate out = *this;
  if (auto* pp = std::get_if<PhasedPauliGate>(&out.op)) {
    pp->term.phase = phase_conjugate(pp->term.phase);
  } else if (auto* mux = std::get_if<BinaryMultiplexerGate>(&out.op)) {
    for (auto& b : mux->branches) b.phase = phase_conjugate(b.phase);
  } else if (auto* prep = std::get_if<StatePrepGate>(&out.op)) {
    prep->dagger = !prep->dagger;
  } else if (auto* dense = std::get_if<DenseUnitaryGate>(&out.op)) {
    dense->dagger = !dense->dagger;
  } else if (auto* ph = std::get_if<GlobalPhaseGate>(&out.op)) {
    ph->phase = std::conj(ph->phase);
  }
  // Rotation, Reflection and MultiControlledZ are involutions.
  return out;
}

Register Circuit::add_register(const std::string& name, int width_,
                               RegisterRole role) {
  Register reg{name, width, width_, role};
  registers.push_back(reg);
  width += width_;
  return reg;
}

void Circuit::append(const Circuit& other) {
  if (other.width != width)
    throw std::invalid_argument("appending circuits of different width");
  gates.insert(gates.end(), other.gates.begin(), other.gates.end());
}

Circuit Circuit::inverse() const {
  Circuit inv;
  inv.width = width;
  inv.registers = registers;
  inv.gates.reserve(gates.size());
  for (auto it = gates.rbegin(); it != gates.rend(); ++it)
    inv.gates.push_back(it->dagger());
  return inv;
}

int simulator_qubit_cap() {
  if (const char* env = std::getenv("LINDSIM_QUBIT_CAP")) {
    int cap = std::atoi(env);
    if (cap > 0) return cap;
  }
  return 22;
}

State make_basis_state(int width, std::uint64_t index) {
  State s(std::size_t{1} << width, cd{0.0, 0.0});
  s[index] = 1.0;
  return s;
}

std::uint64_t register_value(std::uint64_t index, int width,
                             const Register& reg) {
  // Qubit q is bit (width-1-q); register value reads big-endian.
  std::uint64_t shift = width - reg.offset - reg.width;
  return (index >> shift) & ((std::uint64_t{1} << reg.width) - 1);
}

bool controls_satisfied(const ControlSpec& spec, std::uint64_t index,
                        int width) {
  for (const auto& qc : spec.qubits) {
    bool bit = (index >> (width - 1 - qc.qubit)) & 1;
    if (bit != qc.value) return false;
  }
  for (const auto& pred : spec.predicates) {
    std::uint64_t v = register_value(index, width, pred.reg);
    switch (pred.op) {
      case CmpOp::LT:
        if (!(v < pred.bound)) return false;
        break;
      case CmpOp::LE:
        if (!(v <= pred.bound)) return false;
        break;
      case CmpOp::GT:
        if (!(v > pred.bound)) return false;
        break;
      case CmpOp::GE:
        if (!(v >= pred.bound)) return false;
        break;
      case CmpOp::EQ:
        if (!(v == pred.bound)) return false;
        break;
    }
  }
  return true;
}

namespace {

struct PauliMasks {
  std::uint64_t flip = 0;
  std::uint64_t z = 0;
  std::uint64_t y = 0;
  cd base{1.0, 0.0};
};

PauliMasks pauli_masks(const PauliTerm& term, std::span<const int> targets,
                       int width) {
  if (term.axes.size() != targets.size())
    throw std::invalid_argument("pauli targets/axes mismatch");
  PauliMasks m;
  int n_y = 0;
  for (std::size_t k = 0; k < targets.size(); ++k) {
    std::uint64_t bit = std::uint64_t{1} << (width - 1 - targets[k]);
    switch (term.axes[k]) {
      case Axis::I:
        break;
      case Axis::X:
        m.flip |= bit;
        break;
      case Axis::Y:
        m.flip |= bit;
        m.y |= bit;
        ++n_y;
        break;
      case Axis::Z:
        m.z |= bit;
        break;
    }
  }
  m.base = term.weight * phase_value(term.phase);
  for (int k = 0; k < n_y; ++k) m.base *= cd{0.0, 1.0};
  return m;
}

inline cd pauli_factor(const PauliMasks& m, std::uint64_t idx) {
  int sign = std::popcount(idx & m.z) + std::popcount(idx & m.y);
  return (sign & 1) ? -m.base : m.base;
}

void apply_two_by_two(State& state, int width, int qubit,
                      const Eigen::Matrix2cd& u, const ControlSpec& controls) {
  const std::uint64_t bit = std::uint64_t{1} << (width - 1 - qubit);
  const std::uint64_t dim = state.size();
  for (std::uint64_t idx = 0; idx < dim; ++idx) {
    if (idx & bit) continue;
    if (!controls_satisfied(controls, idx, width)) continue;
    cd a = state[idx], b = state[idx | bit];
    state[idx] = u(0, 0) * a + u(0, 1) * b;
    state[idx | bit] = u(1, 0) * a + u(1, 1) * b;
  }
}

void apply_pauli_masked(State& state, int width, const PauliMasks& m,
                        const ControlSpec& controls) {
  const std::uint64_t dim = state.size();
  if (m.flip == 0) {
    for (std::uint64_t idx = 0; idx < dim; ++idx)
      if (controls_satisfied(controls, idx, width))
        state[idx] *= pauli_factor(m, idx);
    return;
  }
  for (std::uint64_t idx = 0; idx < dim; ++idx) {
    std::uint64_t partner = idx ^ m.flip;
    if (partner < idx) continue;
    if (!controls_satisfied(controls, idx, width)) continue;
    // Targets are disjoint from controls, so the partner fires too.
    cd a = state[idx], b = state[partner];
    state[partner] = pauli_factor(m, idx) * a;
    state[idx] = pauli_factor(m, partner) * b;
  }
}

// Gathers the sub-state over mixed-radix register values, applies the
// matrix, scatters back.
void apply_dense_on_registers(State& state, int width,
                              std::span<const Register> regs,
                              std::span<const std::uint64_t> radices,
                              const Matrix& u, const ControlSpec& controls) {
  std::uint64_t dim_sub = 1;
  for (auto r : radices) dim_sub *= r;
  if (u.rows() != static_cast<Eigen::Index>(dim_sub))
    throw std::invalid_argument("dense gate dimension mismatch");

  // Iterate over base indices that have value 0 in every touched register.
  std::uint64_t reg_mask = 0;
  for (const auto& reg : regs) {
    std::uint64_t shift = width - reg.offset - reg.width;
    reg_mask |= ((std::uint64_t{1} << reg.width) - 1) << shift;
  }

  // Precompute the index offset of each sub-basis value tuple.
  std::vector<std::uint64_t> offsets(dim_sub);
  for (std::uint64_t v = 0; v < dim_sub; ++v) {
    std::uint64_t rest = v, offset = 0;
    for (std::size_t k = regs.size(); k-- > 0;) {
      std::uint64_t value = rest % radices[k];
      rest /= radices[k];
      std::uint64_t shift = width - regs[k].offset - regs[k].width;
      offset |= value << shift;
    }
    offsets[v] = offset;
  }

  const std::uint64_t dim = state.size();
  Vector sub(dim_sub);
  for (std::uint64_t base = 0; base < dim; ++base) {
    if (base & reg_mask) continue;  // enumerate each block once
    if (!controls_satisfied(controls, base, width)) continue;
    for (std::uint64_t v = 0; v < dim_sub; ++v)
      sub(v) = state[base | offsets[v]];
    Vector res = u * sub;
    for (std::uint64_t v = 0; v < dim_sub; ++v)
      state[base | offsets[v]] = res(v);
  }
}

void apply_gate(State& state, int width, const Gate& gate) {
  if (const auto* rot = std::get_if<RotationGate>(&gate.op)) {
    apply_two_by_two(state, width, rot->qubit, rotation_matrix(rot->angle),
                     gate.controls);
  } else if (const auto* pp = std::get_if<PhasedPauliGate>(&gate.op)) {
    if (std::abs(pp->term.weight - 1.0) > 1e-12)
      throw std::invalid_argument("phased-Pauli gate must have unit weight");
    apply_pauli_masked(state, width, pauli_masks(pp->term, pp->targets, width),
                       gate.controls);
  } else if (const auto* mux = std::get_if<BinaryMultiplexerGate>(&gate.op)) {
    for (std::size_t v = 0; v < mux->branches.size(); ++v) {
      ControlSpec spec = gate.controls;
      spec.predicates.push_back({mux->selector, CmpOp::EQ, v});
      if (std::abs(mux->branches[v].weight - 1.0) > 1e-12)
        throw std::invalid_argument("multiplexer branch must have unit weight");
      apply_pauli_masked(state, width,
                         pauli_masks(mux->branches[v], mux->targets, width),
                         spec);
    }
  } else if (const auto* prep = std::get_if<StatePrepGate>(&gate.op)) {
    Matrix u = prep->dagger ? prep->unitary.adjoint() : prep->unitary;
    std::uint64_t radix = std::uint64_t{1} << prep->reg.width;
    apply_dense_on_registers(state, width, {&prep->reg, 1}, {&radix, 1}, u,
                             gate.controls);
  } else if (const auto* refl = std::get_if<ReflectionGate>(&gate.op)) {
    const std::uint64_t dim = state.size();
    for (std::uint64_t idx = 0; idx < dim; ++idx) {
      if (!controls_satisfied(gate.controls, idx, width)) continue;
      bool inside = true;
      for (const auto& term : refl->terms)
        if (register_value(idx, width, term.reg) != term.value) {
          inside = false;
          break;
        }
      if (inside) state[idx] = -state[idx];
    }
  } else if (const auto* mcz = std::get_if<MultiControlledZGate>(&gate.op)) {
    const std::uint64_t dim = state.size();
    std::uint64_t mask = 0;
    for (int q : mcz->qubits) mask |= std::uint64_t{1} << (width - 1 - q);
    for (std::uint64_t idx = 0; idx < dim; ++idx) {
      if ((idx & mask) != mask) continue;
      if (!controls_satisfied(gate.controls, idx, width)) continue;
      state[idx] = -state[idx];
    }
  } else if (const auto* dense = std::get_if<DenseUnitaryGate>(&gate.op)) {
    Matrix u = dense->dagger ? dense->matrix.adjoint() : dense->matrix;
    apply_dense_on_registers(state, width, dense->regs, dense->radices, u,
                             gate.controls);
  } else if (const auto* ph = std::get_if<GlobalPhaseGate>(&gate.op)) {
    for (auto& amp : state) amp *= ph->phase;
  }
}

}  // namespace

void simulate(const Circuit& circuit, State& state) {
  if (circuit.width > simulator_qubit_cap())
    throw std::invalid_argument(
        "circuit width " + std::to_string(circuit.width) +
        " exceeds the simulator cap " +
        std::to_string(simulator_qubit_cap()) +
        " (override with LINDSIM_QUBIT_CAP)");
  if (state.size() != (std::size_t{1} << circuit.width))
    throw std::invalid_argument("state dimension does not match circuit");
  for (const auto& gate : circuit.gates) apply_gate(state, circuit.width, gate);
}

State simulate(const Circuit& circuit, const State& input) {
  State s = input;
  simulate(circuit, s);
  return s;
}

Matrix circuit_unitary(const Circuit& circuit) {
  const Eigen::Index dim = Eigen::Index{1} << circuit.width;
  Matrix u(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    State s = make_basis_state(circuit.width, col);
    simulate(circuit, s);
    for (Eigen::Index row = 0; row < dim; ++row) u(row, col) = s[row];
  }
  return u;
}

Matrix gate_local_unitary(const Gate& gate) {
  // Build a minimal circuit covering the gate's support and read off the
  // dense matrix, with controls stripped.
  Gate bare = gate;
  bare.controls = {};
  int max_qubit = -1;
  auto cover = [&](int q) { max_qubit = std::max(max_qubit, q); };
  if (const auto* rot = std::get_if<RotationGate>(&bare.op)) {
    cover(rot->qubit);
  } else if (const auto* pp = std::get_if<PhasedPauliGate>(&bare.op)) {
    for (int q : pp->targets) cover(q);
  } else if (const auto* mux = std::get_if<BinaryMultiplexerGate>(&bare.op)) {
    for (int q : mux->targets) cover(q);
    cover(mux->selector.offset + mux->selector.width - 1);
  } else if (const auto* prep = std::get_if<StatePrepGate>(&bare.op)) {
    cover(prep->reg.offset + prep->reg.width - 1);
  } else if (const auto* refl = std::get_if<ReflectionGate>(&bare.op)) {
    for (const auto& term : refl->terms)
      cover(term.reg.offset + term.reg.width - 1);
  } else if (const auto* mcz = std::get_if<MultiControlledZGate>(&bare.op)) {
    for (int q : mcz->qubits) cover(q);
  } else if (const auto* dense = std::get_if<DenseUnitaryGate>(&bare.op)) {
    for (const auto& reg : dense->regs) cover(reg.offset + reg.width - 1);
  }
  Circuit c;
  c.width = std::max(max_qubit + 1, 1);
  c.gates.push_back(bare);
  return circuit_unitary(c);
}

Matrix trace_out_upper(const State& state, int width, int n_state) {
  const Eigen::Index d = Eigen::Index{1} << n_state;
  const std::uint64_t blocks = std::uint64_t{1} << (width - n_state);
  Matrix rho = Matrix::Zero(d, d);
  for (std::uint64_t b = 0; b < blocks; ++b) {
    const cd* chunk = state.data() + b * d;
    for (Eigen::Index s = 0; s < d; ++s)
      for (Eigen::Index t = 0; t < d; ++t)
        rho(s, t) += chunk[s] * std::conj(chunk[t]);
  }
  return rho;
}

Matrix complete_unitary(const Matrix& leading_columns) {
  const Eigen::Index dim = leading_columns.rows();
  const Eigen::Index given = leading_columns.cols();
  Matrix u(dim, dim);
  u.leftCols(given) = leading_columns;
  Eigen::Index filled = given;
  for (Eigen::Index basis = 0; basis < dim && filled < dim; ++basis) {
    Vector candidate = Vector::Zero(dim);
    candidate(basis) = 1.0;
    for (Eigen::Index k = 0; k < filled; ++k)
      candidate -= u.col(k).dot(candidate) * u.col(k);
    double norm = candidate.norm();
    if (norm > 1e-8) {
      u.col(filled++) = candidate / norm;
    }
  }
  if (filled != dim)
    throw std::runtime_error("unitary completion failed: rank defect");
  return u;
}

std::string Circuit::dump() const {
  std::ostringstream os;
  auto controls_str = [this](const ControlSpec& spec) {
    std::ostringstream cs;
    for (const auto& qc : spec.qubits)
      cs << " @q" << qc.qubit << "=" << (qc.value ? 1 : 0);
    for (const auto& pred : spec.predicates) {
      const char* ops[] = {"<", "<=", ">", ">=", "=="};
      cs << " @" << pred.reg.name << ops[static_cast<int>(pred.op)]
         << pred.bound;
    }
    (void)this;
    return cs.str();
  };
  for (const auto& gate : gates) {
    if (const auto* rot = std::get_if<RotationGate>(&gate.op)) {
      os << "rotation q" << rot->qubit << " angle=" << rot->angle;
    } else if (const auto* pp = std::get_if<PhasedPauliGate>(&gate.op)) {
      os << "pauli " << axes_to_string(pp->term.axes) << " phase=i^"
         << static_cast<int>(pp->term.phase) << " targets=[";
      for (std::size_t k = 0; k < pp->targets.size(); ++k)
        os << (k ? "," : "") << pp->targets[k];
      os << "]";
    } else if (const auto* mux = std::get_if<BinaryMultiplexerGate>(&gate.op)) {
      os << "multiplexer sel=" << mux->selector.name << " branches=[";
      for (std::size_t v = 0; v < mux->branches.size(); ++v)
        os << (v ? "," : "") << axes_to_string(mux->branches[v].axes);
      os << "]";
    } else if (const auto* prep = std::get_if<StatePrepGate>(&gate.op)) {
      os << "state-prep" << (prep->dagger ? "-dagger" : "") << " reg="
         << prep->reg.name;
    } else if (const auto* refl = std::get_if<ReflectionGate>(&gate.op)) {
      os << "reflection about";
      for (const auto& term : refl->terms)
        os << " " << term.reg.name << "=" << term.value;
    } else if (std::get_if<MultiControlledZGate>(&gate.op)) {
      os << "multi-controlled-z";
    } else if (const auto* dense = std::get_if<DenseUnitaryGate>(&gate.op)) {
      os << "dense-unitary" << (dense->dagger ? "-dagger" : "") << " regs=[";
      for (std::size_t k = 0; k < dense->regs.size(); ++k)
        os << (k ? "," : "") << dense->regs[k].name;
      os << "]";
    } else if (const auto* ph = std::get_if<GlobalPhaseGate>(&gate.op)) {
      os << "global-phase " << ph->phase.real() << (ph->phase.imag() >= 0 ? "+" : "")
         << ph->phase.imag() << "i";
    }
    os << controls_str(gate.controls) << "\n";
  }
  return os.str();
}

}  // namespace lindsim
