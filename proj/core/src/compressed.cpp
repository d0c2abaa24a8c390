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

#include "lindsim/compressed.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace lindsim {

namespace {

int clog2(long long x) {
  int k = 0;
  while ((1LL << k) < x) ++k;
  return k;
}

int jump_anc_width(const PauliSum& jump) {
  std::size_t terms = jump.size();
  if (terms <= 1) return 0;
  return clog2(static_cast<long long>(terms));
}

int max_jump_anc_width(const Lindbladian& L) {
  int w = 0;
  for (const auto& j : L.jumps) w = std::max(w, jump_anc_width(j));
  return w;
}

struct SlotRegs {
  Register sel1, sel2, c1, c2, anc1, anc2;
  Register sel_block, ctrl_block;
  int anc_w = 0;
};

SlotRegs carve(const Register& sel_block, const Register& ctrl_block,
               int s1w, int w) {
  SlotRegs r;
  r.sel_block = sel_block;
  r.ctrl_block = ctrl_block;
  r.anc_w = w;
  r.sel1 = {"sel1", sel_block.offset, s1w, RegisterRole::Selection};
  r.sel2 = {"sel2", sel_block.offset + s1w, 1, RegisterRole::Selection};
  r.c1 = {"c1", ctrl_block.offset, 1, RegisterRole::Control};
  r.c2 = {"c2", ctrl_block.offset + 1, 1, RegisterRole::Control};
  r.anc1 = {"b1", ctrl_block.offset + 2, w, RegisterRole::Control};
  r.anc2 = {"b2", ctrl_block.offset + 2 + w, w, RegisterRole::Control};
  return r;
}

Register sub_register(const Register& reg, int width, const char* name) {
  return {name, reg.offset, width, reg.role};
}

Matrix b_column_unitary(const PauliSum& jump, double cj, int w) {
  const Eigen::Index dim = Eigen::Index{1} << w;
  Matrix col = Matrix::Zero(dim, 1);
  for (std::size_t l = 0; l < jump.size(); ++l)
    col(static_cast<Eigen::Index>(l), 0) = std::sqrt(jump.terms[l].weight / cj);
  return complete_unitary(col);
}

std::vector<int> state_targets(const Register& state_reg) {
  std::vector<int> t(state_reg.width);
  for (int k = 0; k < state_reg.width; ++k) t[k] = state_reg.qubit(k);
  return t;
}

ControlSpec pred(const Register& reg, CmpOp op, std::uint64_t bound) {
  ControlSpec spec;
  spec.predicates.push_back({reg, op, bound});
  return spec;
}

// Mean good-branch weight of a W body over the state basis: the extra
// rotation is calibrated so the amplified branch carries amplitude 1/2
// exactly on average (state dependence is an O(r (lambda delta)^2)
// residual the amplification bound absorbs).
double measured_good_weight(const Circuit& body,
                            const std::vector<SubspaceTerm>& good_terms,
                            int n_state) {
  const Eigen::Index d = Eigen::Index{1} << n_state;
  double total = 0;
  for (Eigen::Index i = 0; i < d; ++i) {
    State s = make_basis_state(body.width, static_cast<std::uint64_t>(i));
    simulate(body, s);
    for (std::uint64_t idx = 0; idx < s.size(); ++idx) {
      bool good = true;
      for (const auto& term : good_terms)
        if (register_value(idx, body.width, term.reg) != term.value) {
          good = false;
          break;
        }
      if (good) total += std::norm(s[idx]);
    }
  }
  return total / static_cast<double>(d);
}

Gate amplitude_gate(const Register& extra, double amplitude) {
  if (amplitude > 1.0 || amplitude <= 0.0)
    throw std::invalid_argument(
        "good-branch weight below 1/4: amplification undefined");
  Matrix rot(2, 2);
  rot << amplitude, std::sqrt(1 - amplitude * amplitude),
      std::sqrt(1 - amplitude * amplitude), -amplitude;
  return {DenseUnitaryGate{{extra}, {2}, rot, false}, {}};
}

void add_pred(ControlSpec& spec, const Register& reg, CmpOp op,
              std::uint64_t bound) {
  spec.predicates.push_back({reg, op, bound});
}

// --- structured factors --------------------------------------------------

void emit_G(Circuit& c, const SlotRegs& regs, const DerivedParams& p,
            const std::vector<double>& mixture, const GadgetParams& params) {
  const Eigen::Index dim = Eigen::Index{1} << regs.sel1.width;
  Matrix col = Matrix::Zero(dim, 1);
  for (std::size_t i = 0; i < mixture.size(); ++i)
    col(static_cast<Eigen::Index>(i), 0) = std::sqrt(mixture[i]);
  c.add({StatePrepGate{regs.sel1, complete_unitary(col), false}, {}});
  if (p.m > 0)
    c.add({RotationGate{regs.sel2.offset, params.alpha1},
           pred(regs.sel1, CmpOp::GE, static_cast<std::uint64_t>(p.q0))});
}

void emit_Vp(Circuit& c, const SlotRegs& regs, const Lindbladian& L,
             const DerivedParams& p, const GadgetParams& params) {
  const auto q0 = static_cast<std::uint64_t>(p.q0);
  if (p.q0 > 0) {
    c.add({RotationGate{regs.c1.offset, params.alpha},
           pred(regs.sel1, CmpOp::LT, q0)});
    c.add({RotationGate{regs.c2.offset, params.beta1 / 2},
           pred(regs.sel1, CmpOp::LT, q0)});
  }
  if (p.m > 0) {
    c.add({RotationGate{regs.c1.offset, params.alpha2},
           pred(regs.sel1, CmpOp::GE, q0)});
    c.add({RotationGate{regs.c2.offset, params.beta2 / 2},
           pred(regs.sel1, CmpOp::GE, q0)});
  }
  for (int j = 0; j < p.m; ++j) {
    int wj = jump_anc_width(L.jumps[j]);
    if (wj == 0) continue;
    Matrix b = b_column_unitary(L.jumps[j], p.c[j], wj);
    for (const Register* anc : {&regs.anc1, &regs.anc2}) {
      c.add({StatePrepGate{sub_register(*anc, wj, "b"), b, false},
             pred(regs.sel1, CmpOp::EQ, q0 + j)});
    }
  }
}

void emit_Vc(Circuit& c, const SlotRegs& regs, const Lindbladian& L,
             const DerivedParams& p, const Register& state_reg) {
  const auto q0 = static_cast<std::uint64_t>(p.q0);
  auto targets = state_targets(state_reg);
  if (p.q0 > 0) {
    std::vector<PauliTerm> branches;
    branches.reserve(p.q0);
    for (const auto& term : L.hamiltonian.terms) {
      PauliTerm v = term.unit();
      v.phase = phase_multiply(v.phase, Phase::MinusI);
      branches.push_back(std::move(v));
    }
    ControlSpec spec;
    spec.qubits.push_back({regs.c1.offset, true});
    c.add({BinaryMultiplexerGate{regs.sel1, std::move(branches), targets},
           std::move(spec)});
  }
  for (int j = 0; j < p.m; ++j) {
    const PauliSum& jump = L.jumps[j];
    int wj = jump_anc_width(jump);
    auto branches = [&](Phase extra, bool adjoint) {
      std::vector<PauliTerm> out;
      out.reserve(jump.size());
      for (const auto& term : jump.terms) {
        PauliTerm v = adjoint ? term.unit().adjoint() : term.unit();
        v.phase = phase_multiply(v.phase, extra);
        out.push_back(std::move(v));
      }
      return out;
    };
    auto add_leg = [&](const Register& anc, Phase extra, bool adjoint,
                       ControlSpec spec) {
      add_pred(spec, regs.sel1, CmpOp::EQ, q0 + j);
      if (wj > 0) {
        c.add({BinaryMultiplexerGate{sub_register(anc, wj, "b"),
                                     branches(extra, adjoint), targets},
               std::move(spec)});
      } else {
        c.add({PhasedPauliGate{branches(extra, adjoint)[0], targets},
               std::move(spec)});
      }
    };
    ControlSpec on_jump;
    on_jump.qubits.push_back({regs.sel2.offset, true});
    add_leg(regs.anc2, Phase::Plus, false, on_jump);

    ControlSpec on_damp;
    on_damp.qubits.push_back({regs.sel2.offset, false});
    on_damp.qubits.push_back({regs.c1.offset, true});
    add_leg(regs.anc2, Phase::Minus, false, on_damp);
    add_leg(regs.anc1, Phase::Plus, true, on_damp);
  }
}

void emit_Vp_prime(Circuit& c, const SlotRegs& regs, const Lindbladian& L,
                   const DerivedParams& p, const GadgetParams& params) {
  const auto q0 = static_cast<std::uint64_t>(p.q0);
  PauliTerm x_gate{{Axis::X}, Phase::Plus, 1.0};
  if (p.q0 > 0) {
    c.add({PhasedPauliGate{x_gate, {regs.c1.offset}},
           pred(regs.sel1, CmpOp::LT, q0)});
    c.add({RotationGate{regs.c2.offset, params.beta1 / 2},
           pred(regs.sel1, CmpOp::LT, q0)});
  }
  if (p.m > 0) {
    ControlSpec damp = pred(regs.sel1, CmpOp::GE, q0);
    damp.qubits.push_back({regs.sel2.offset, false});
    c.add({PhasedPauliGate{x_gate, {regs.c1.offset}}, damp});
    ControlSpec jumpy = pred(regs.sel1, CmpOp::GE, q0);
    jumpy.qubits.push_back({regs.sel2.offset, true});
    c.add({RotationGate{regs.c1.offset, params.alpha2}, jumpy});
    c.add({RotationGate{regs.c2.offset, params.beta2 / 2},
           pred(regs.sel1, CmpOp::GE, q0)});
  }
  for (int j = 0; j < p.m; ++j) {
    int wj = jump_anc_width(L.jumps[j]);
    if (wj == 0) continue;
    Matrix b = b_column_unitary(L.jumps[j], p.c[j], wj);
    for (const Register* anc : {&regs.anc1, &regs.anc2}) {
      c.add({StatePrepGate{sub_register(*anc, wj, "b"), b, false},
             pred(regs.sel1, CmpOp::EQ, q0 + j)});
    }
  }
}

}  // namespace

StructuredPurification build_structured_purification(const Lindbladian& L,
                                                     double delta) {
  DerivedParams p = derived_params(L);
  StructuredPurification sp;
  sp.params = compute_gadget_params(p.lambda, delta);
  sp.mixture = mixture_distribution(L).weights;
  sp.q0 = p.q0;
  sp.m = p.m;

  const int s1w = std::max(1, clog2(p.q0 + p.m));
  const int w = max_jump_anc_width(L);

  Circuit& slot = sp.slot;
  sp.sel_block = slot.add_register("sel", s1w + 1, RegisterRole::Selection);
  sp.ctrl_block = slot.add_register("ctrl", 2 + 2 * w, RegisterRole::Control);
  sp.state_reg = slot.add_register("state", L.n, RegisterRole::State);
  SlotRegs regs = carve(sp.sel_block, sp.ctrl_block, s1w, w);
  sp.sel1 = regs.sel1;
  sp.sel2 = regs.sel2;
  sp.c1 = regs.c1;
  sp.c2 = regs.c2;
  sp.anc1 = regs.anc1;
  sp.anc2 = regs.anc2;
  sp.anc_w = w;
  sp.anc_width_total = sp.sel_block.width + sp.ctrl_block.width;

  auto make_part = [&slot]() {
    Circuit c;
    c.width = slot.width;
    c.registers = slot.registers;
    return c;
  };
  sp.g_part = make_part();
  emit_G(sp.g_part, regs, p, sp.mixture, sp.params);
  sp.vp_part = make_part();
  emit_Vp(sp.vp_part, regs, L, p, sp.params);
  sp.vc_part = make_part();
  emit_Vc(sp.vc_part, regs, L, p, sp.state_reg);

  slot.append(sp.g_part);
  slot.append(sp.vp_part);
  slot.append(sp.vc_part);
  slot.append(sp.vp_part.inverse());

  // Preparation state on the ancilla space (G and V_p never touch the
  // state register, so simulate them at ancilla width).
  Circuit anc_only;
  anc_only.width = sp.anc_width_total;
  anc_only.gates = sp.g_part.gates;
  anc_only.gates.insert(anc_only.gates.end(), sp.vp_part.gates.begin(),
                        sp.vp_part.gates.end());
  State prep = make_basis_state(anc_only.width, 0);
  simulate(anc_only, prep);
  sp.prep = Eigen::Map<const Vector>(prep.data(), prep.size());

  auto mask = trivial_subspace_mask(sp);
  Vector trivial = sp.prep;
  Vector nontrivial = sp.prep;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i])
      nontrivial(static_cast<Eigen::Index>(i)) = 0;
    else
      trivial(static_cast<Eigen::Index>(i)) = 0;
  }
  sp.p_I = trivial.squaredNorm();
  sp.lambda_star = nontrivial.norm();
  sp.chi = sp.lambda_star > 0 ? Vector(nontrivial / sp.lambda_star)
                              : Vector(Vector::Zero(nontrivial.size()));

  sp.p_bar = 0.0;
  for (int i = 0; i < p.q0; ++i) sp.p_bar += sp.mixture[i] * sp.params.p1;
  for (int j = 0; j < p.m; ++j)
    sp.p_bar += sp.mixture[p.q0 + j] * sp.params.p2;
  return sp;
}

std::vector<bool> trivial_subspace_mask(const StructuredPurification& sp) {
  const std::size_t dim = std::size_t{1} << sp.anc_width_total;
  std::vector<bool> mask(dim);
  for (std::size_t idx = 0; idx < dim; ++idx) {
    std::uint64_t sel2 = register_value(idx, sp.anc_width_total, sp.sel2);
    std::uint64_t c1 = register_value(idx, sp.anc_width_total, sp.c1);
    mask[idx] = (sel2 == 0 && c1 == 0);
  }
  return mask;
}

Circuit direct_mixture_purification(const Lindbladian& L, double delta) {
  DerivedParams p = derived_params(L);
  GadgetParams params = compute_gadget_params(p.lambda, delta);
  auto mixture = mixture_distribution(L).weights;

  const int s1w = std::max(1, clog2(p.q0 + p.m));
  const int w = max_jump_anc_width(L);
  Circuit c;
  Register sel_block = c.add_register("sel", s1w + 1, RegisterRole::Selection);
  Register ctrl_block =
      c.add_register("ctrl", 2 + 2 * w, RegisterRole::Control);
  Register state_reg = c.add_register("state", L.n, RegisterRole::State);
  SlotRegs regs = carve(sel_block, ctrl_block, s1w, w);
  auto targets = state_targets(state_reg);

  const Eigen::Index dim = Eigen::Index{1} << s1w;
  Matrix col = Matrix::Zero(dim, 1);
  for (std::size_t i = 0; i < mixture.size(); ++i)
    col(static_cast<Eigen::Index>(i), 0) = std::sqrt(mixture[i]);
  c.add({StatePrepGate{regs.sel1, complete_unitary(col), false}, {}});

  // One gadget body per channel, every gate conditioned on its index.
  for (int l = 0; l < p.q0; ++l) {
    auto on_l = [&](Gate g) {
      add_pred(g.controls, regs.sel1, CmpOp::EQ,
               static_cast<std::uint64_t>(l));
      c.add(std::move(g));
    };
    on_l({RotationGate{regs.c2.offset, params.beta1 / 2}, {}});
    on_l({RotationGate{regs.c1.offset, params.alpha}, {}});
    PauliTerm v = L.hamiltonian.terms[l].unit();
    v.phase = phase_multiply(v.phase, Phase::MinusI);
    Gate controlled{PhasedPauliGate{v, targets}, {}};
    controlled.controls.qubits.push_back({regs.c1.offset, true});
    on_l(std::move(controlled));
    on_l({RotationGate{regs.c1.offset, params.alpha}, {}});
    on_l({RotationGate{regs.c2.offset, params.beta1 / 2}, {}});
  }
  for (int j = 0; j < p.m; ++j) {
    const PauliSum& jump = L.jumps[j];
    const int wj = jump_anc_width(jump);
    const auto idx = static_cast<std::uint64_t>(p.q0 + j);
    auto on_j = [&](Gate g) {
      add_pred(g.controls, regs.sel1, CmpOp::EQ, idx);
      c.add(std::move(g));
    };
    auto branches = [&](Phase extra, bool adjoint) {
      std::vector<PauliTerm> out;
      for (const auto& term : jump.terms) {
        PauliTerm v = adjoint ? term.unit().adjoint() : term.unit();
        v.phase = phase_multiply(v.phase, extra);
        out.push_back(std::move(v));
      }
      return out;
    };
    Matrix b;
    if (wj > 0) b = b_column_unitary(jump, p.c[j], wj);

    on_j({RotationGate{regs.c2.offset, params.beta2 / 2}, {}});
    on_j({RotationGate{regs.sel2.offset, params.alpha1}, {}});
    on_j({RotationGate{regs.c1.offset, params.alpha2}, {}});
    if (wj > 0) {
      on_j({StatePrepGate{sub_register(regs.anc1, wj, "b"), b, false}, {}});
      on_j({StatePrepGate{sub_register(regs.anc2, wj, "b"), b, false}, {}});
    }
    auto add_leg = [&](const Register& anc, Phase extra, bool adjoint,
                       ControlSpec spec) {
      if (wj > 0) {
        on_j({BinaryMultiplexerGate{sub_register(anc, wj, "b"),
                                    branches(extra, adjoint), targets},
              std::move(spec)});
      } else {
        on_j({PhasedPauliGate{branches(extra, adjoint)[0], targets},
              std::move(spec)});
      }
    };
    ControlSpec on_jump;
    on_jump.qubits.push_back({regs.sel2.offset, true});
    add_leg(regs.anc2, Phase::Plus, false, on_jump);
    ControlSpec on_damp;
    on_damp.qubits.push_back({regs.sel2.offset, false});
    on_damp.qubits.push_back({regs.c1.offset, true});
    add_leg(regs.anc2, Phase::Minus, false, on_damp);
    add_leg(regs.anc1, Phase::Plus, true, on_damp);
    on_j({RotationGate{regs.c1.offset, params.alpha2}, {}});
    if (wj > 0) {
      on_j({StatePrepGate{sub_register(regs.anc1, wj, "b"), b, true}, {}});
      on_j({StatePrepGate{sub_register(regs.anc2, wj, "b"), b, true}, {}});
    }
    on_j({RotationGate{regs.c2.offset, params.beta2 / 2}, {}});
  }
  return c;
}

EncodedPreparation build_G_prime_Vp_prime(const Lindbladian& L,
                                          const StructuredPurification& sp) {
  if (sp.lambda_star <= 0)
    throw std::invalid_argument(
        "no nontrivial branch: lambda_* vanishes (delta too small)");
  EncodedPreparation out;
  out.lambda_star = sp.lambda_star;

  const GadgetParams& g = sp.params;
  auto x_of = [](double angle) { return 1.0 / (1.0 + std::tan(angle)); };
  const double x_alpha = x_of(g.alpha);
  const double x_a1 = x_of(g.alpha1);
  const double x_a2 = x_of(g.alpha2);

  const Eigen::Index dim = Eigen::Index{1} << (sp.sel1.width + 1);
  out.g_prime_column = Vector::Zero(dim);
  const double ls2 = sp.lambda_star * sp.lambda_star;
  for (int l = 0; l < sp.q0; ++l)
    out.g_prime_column(2 * l) =
        std::sqrt(sp.mixture[l] * (1.0 - x_alpha) / ls2);
  for (int j = 0; j < sp.m; ++j) {
    double pr = sp.mixture[sp.q0 + j];
    out.g_prime_column(2 * (sp.q0 + j)) =
        std::sqrt(pr * x_a1 * (1.0 - x_a2) / ls2);
    out.g_prime_column(2 * (sp.q0 + j) + 1) =
        std::sqrt(pr * (1.0 - x_a1) / ls2);
  }

  // Slot-local V'_p over the ancilla registers, and the prepared state
  // V'_p (G' (x) I)|0,0> for the nontrivial-branch identity check.
  out.vp_prime.width = sp.anc_width_total;
  {
    DerivedParams p = derived_params(L);
    SlotRegs regs = carve(sp.sel_block, sp.ctrl_block, sp.sel1.width,
                          sp.anc_w);
    emit_Vp_prime(out.vp_prime, regs, L, p, sp.params);
  }
  Circuit prep_circuit;
  prep_circuit.width = sp.anc_width_total;
  Matrix gcol = Matrix::Zero(dim, 1);
  gcol.col(0) = out.g_prime_column;
  prep_circuit.add(
      {StatePrepGate{sp.sel_block, complete_unitary(gcol), false}, {}});
  prep_circuit.gates.insert(prep_circuit.gates.end(),
                            out.vp_prime.gates.begin(),
                            out.vp_prime.gates.end());
  State prepared = make_basis_state(prep_circuit.width, 0);
  simulate(prep_circuit, prepared);
  out.prepared = Eigen::Map<const Vector>(prepared.data(), prepared.size());
  return out;
}

EncodedRotation build_E_std(int r, int h) {
  double x = static_cast<double>(r) / (r + 1);
  return build_E_std(r, h, std::sqrt(x), std::sqrt(1.0 - x));
}

namespace {

// Flat index of a position tuple; register 0 is the most significant.
long long position_index(const std::vector<int>& values, int h, int radix) {
  long long idx = 0;
  for (int k = 0; k < h; ++k) idx = idx * radix + values[k];
  return idx;
}

// Column of the encoded product state truncated at weight h: amplitudes
// a0^(r-w) a1^w on each increasing tuple of w firing positions.
Vector encoded_column(int r, int h, double a0, double a1) {
  const int radix = r + 1;
  long long dim = 1;
  for (int k = 0; k < h; ++k) dim *= radix;
  Vector col = Vector::Zero(dim);

  std::vector<int> tuple(h, r);
  // weight 0
  col(position_index(tuple, h, radix)) = std::pow(a0, r);
  for (int wgt = 1; wgt <= std::min(h, r); ++wgt) {
    std::vector<int> comb(wgt);
    for (int k = 0; k < wgt; ++k) comb[k] = k;
    for (;;) {
      std::vector<int> values(h, r);
      for (int k = 0; k < wgt; ++k) values[k] = comb[k];
      col(position_index(values, h, radix)) =
          std::pow(a0, r - wgt) * std::pow(a1, wgt);
      // next combination
      int k = wgt - 1;
      while (k >= 0 && comb[k] == r - wgt + k) --k;
      if (k < 0) break;
      ++comb[k];
      for (int j = k + 1; j < wgt; ++j) comb[j] = comb[j - 1] + 1;
    }
  }
  return col;
}

}  // namespace

EncodedRotation build_E_std(int r, int h, double amp_trivial,
                            double amp_nontrivial) {
  if (r < 1 || h < 1) throw std::invalid_argument("need r >= 1 and h >= 1");
  const int radix = r + 1;
  long long dim = 1;
  for (int k = 0; k < h; ++k) {
    dim *= radix;
    if (dim > 4096)
      throw std::invalid_argument("position space too large to complete");
  }

  EncodedRotation enc;
  enc.r = r;
  enc.h = h;
  enc.amp_trivial = amp_trivial;
  enc.amp_nontrivial = amp_nontrivial;

  Vector col = encoded_column(r, h, amp_trivial, amp_nontrivial);
  double captured = col.squaredNorm();
  enc.tail = std::max(0.0, 1.0 - captured);
  enc.eps_enc = 1.0 - std::sqrt(captured);

  Matrix leading = col / col.norm();
  Matrix u = complete_unitary(leading);
  // Move the prepared column onto the encoded ground state |r, ..., r>.
  const long long init = dim - 1;
  u.col(0).swap(u.col(init));
  enc.e_std = std::move(u);
  return enc;
}

double encoded_rotation_error(const EncodedRotation& enc) {
  Vector target =
      encoded_column(enc.r, enc.h, enc.amp_trivial, enc.amp_nontrivial);
  long long dim = enc.e_std.rows();
  Vector ground = Vector::Zero(dim);
  ground(dim - 1) = 1.0;
  return (target - enc.e_std * ground).norm();
}

// --- uncompressed reference ----------------------------------------------

Matrix structured_segment_channel_uncompressed(const Lindbladian& L,
                                               double delta, int r) {
  DerivedParams p = derived_params(L);
  StructuredPurification sp = build_structured_purification(L, delta);

  const int s1w = sp.sel1.width;
  const int w = sp.anc_w;
  const int slot_width = (s1w + 1) + (2 + 2 * w);
  const int total = 1 + r * slot_width + L.n;
  if (total > simulator_qubit_cap())
    throw std::invalid_argument(
        "uncompressed structured segment needs " + std::to_string(total) +
        " qubits (1 + " + std::to_string(r) + "*" +
        std::to_string(slot_width) + " + " + std::to_string(L.n) +
        ") > cap " + std::to_string(simulator_qubit_cap()));

  Circuit wc;
  Register extra = wc.add_register("extra", 1, RegisterRole::Extra);
  std::vector<Register> sel_blocks, ctrl_blocks;
  for (int k = 0; k < r; ++k) {
    sel_blocks.push_back(wc.add_register("sel" + std::to_string(k), s1w + 1,
                                         RegisterRole::Selection));
    ctrl_blocks.push_back(wc.add_register("ctrl" + std::to_string(k),
                                          2 + 2 * w, RegisterRole::Control));
  }
  Register state_reg = wc.add_register("state", L.n, RegisterRole::State);

  Circuit body;
  body.width = wc.width;
  for (int k = 0; k < r; ++k) {
    SlotRegs regs = carve(sel_blocks[k], ctrl_blocks[k], s1w, w);
    Circuit tmp;
    tmp.width = wc.width;
    emit_G(tmp, regs, p, sp.mixture, sp.params);
    emit_Vp(tmp, regs, L, p, sp.params);
    emit_Vc(tmp, regs, L, p, state_reg);
    Circuit vp_only;
    vp_only.width = wc.width;
    emit_Vp(vp_only, regs, L, p, sp.params);
    tmp.append(vp_only.inverse());
    body.append(tmp);
  }

  std::vector<SubspaceTerm> good;
  for (const auto& ctrl : ctrl_blocks) good.push_back({ctrl, 0});
  double kappa = measured_good_weight(body, good, L.n);
  wc.add(amplitude_gate(extra, 0.5 / std::sqrt(kappa)));
  wc.append(body);

  std::vector<SubspaceTerm> p0{{extra, 0}};
  for (const auto& ctrl : ctrl_blocks) p0.push_back({ctrl, 0});
  std::vector<SubspaceTerm> p1 = p0;
  for (const auto& sel : sel_blocks) p1.push_back({sel, 0});

  return traced_channel_superop(oaa_circuit(wc, p0, p1), L.n);
}

// --- dense compressed reference ------------------------------------------

Matrix algorithm2_segment_channel_dense(const Lindbladian& L, double delta,
                                        int r, int h) {
  DerivedParams p = derived_params(L);
  StructuredPurification sp = build_structured_purification(L, delta);
  EncodedPreparation ep = build_G_prime_Vp_prime(L, sp);
  EncodedRotation enc =
      build_E_std(r, h, std::sqrt(sp.p_I), sp.lambda_star);

  const int s1w = sp.sel1.width;
  const int w = sp.anc_w;
  const int pos_w = clog2(r + 1);
  const int slot_width = (s1w + 1) + (2 + 2 * w);
  const int total = 1 + h * (pos_w + slot_width) + L.n;
  if (total > simulator_qubit_cap())
    throw std::invalid_argument(
        "dense compressed segment needs " + std::to_string(total) +
        " qubits > cap " + std::to_string(simulator_qubit_cap()));

  Circuit full;
  Register extra = full.add_register("extra", 1, RegisterRole::Extra);
  std::vector<Register> pos;
  for (int k = 0; k < h; ++k)
    pos.push_back(
        full.add_register("pos" + std::to_string(k), pos_w,
                          RegisterRole::Control));
  std::vector<Register> sel_blocks, ctrl_blocks;
  for (int k = 0; k < h; ++k) {
    sel_blocks.push_back(full.add_register("sel" + std::to_string(k), s1w + 1,
                                           RegisterRole::Selection));
    ctrl_blocks.push_back(full.add_register("ctrl" + std::to_string(k),
                                            2 + 2 * w, RegisterRole::Control));
  }
  Register state_reg = full.add_register("state", L.n, RegisterRole::State);

  // Initialize positions to |r> (traced channels start from |0...0>).
  Circuit init;
  init.width = full.width;
  PauliTerm x_gate{{Axis::X}, Phase::Plus, 1.0};
  for (int k = 0; k < h; ++k)
    for (int b = 0; b < pos_w; ++b)
      if ((r >> (pos_w - 1 - b)) & 1)
        init.add({PhasedPauliGate{x_gate, {pos[k].qubit(b)}}, {}});

  // W body: E_std, conditioned preparations, multiplexers, conditioned
  // unpreparations, E_std^dag.
  Circuit wc;
  wc.width = full.width;
  std::vector<std::uint64_t> radices(h, static_cast<std::uint64_t>(r) + 1);
  wc.add({DenseUnitaryGate{pos, radices, enc.e_std, false}, {}});

  const Eigen::Index gdim = Eigen::Index{1} << (s1w + 1);
  Matrix gcol = Matrix::Zero(gdim, 1);
  gcol.col(0) = ep.g_prime_column;
  Matrix g_prime_unitary = complete_unitary(gcol);

  std::vector<SlotRegs> slot_regs;
  for (int k = 0; k < h; ++k)
    slot_regs.push_back(carve(sel_blocks[k], ctrl_blocks[k], s1w, w));

  auto conditioned = [&](Circuit& target, const Circuit& gates, int k) {
    for (Gate g : gates.gates) {
      add_pred(g.controls, pos[k], CmpOp::LT, static_cast<std::uint64_t>(r));
      target.add(std::move(g));
    }
  };

  // The full encoded rotation: the prepared slots must be unprepared and
  // the position register recombined (E_std^dag) before the reflections;
  // the sector interference there is what assembles the coherent Kraus
  // sums from the trivial and fired branches.
  for (int k = 0; k < h; ++k) {
    wc.add({StatePrepGate{sel_blocks[k], g_prime_unitary, false},
            pred(pos[k], CmpOp::LT, static_cast<std::uint64_t>(r))});
    Circuit vpp;
    vpp.width = full.width;
    emit_Vp_prime(vpp, slot_regs[k], L, p, sp.params);
    conditioned(wc, vpp, k);
  }
  for (int k = 0; k < h; ++k) {
    Circuit vc;
    vc.width = full.width;
    emit_Vc(vc, slot_regs[k], L, p, state_reg);
    conditioned(wc, vc, k);
  }
  for (int k = 0; k < h; ++k) {
    Circuit unprep;
    unprep.width = full.width;
    unprep.add({StatePrepGate{sel_blocks[k], g_prime_unitary, false}, {}});
    emit_Vp_prime(unprep, slot_regs[k], L, p, sp.params);
    conditioned(wc, unprep.inverse(), k);
  }
  wc.add({DenseUnitaryGate{pos, radices, enc.e_std, true}, {}});

  std::vector<SubspaceTerm> good;
  for (int k = 0; k < h; ++k) {
    good.push_back({pos[k], static_cast<std::uint64_t>(r)});
    good.push_back({ctrl_blocks[k], 0});
  }
  Circuit body_from_ground;
  body_from_ground.width = full.width;
  body_from_ground.append(init);
  body_from_ground.append(wc);
  double kappa = measured_good_weight(body_from_ground, good, L.n);

  Circuit w_final;
  w_final.width = full.width;
  w_final.add(amplitude_gate(extra, 0.5 / std::sqrt(kappa)));
  w_final.append(wc);

  std::vector<SubspaceTerm> p0{{extra, 0}};
  p0.insert(p0.end(), good.begin(), good.end());
  std::vector<SubspaceTerm> p1 = p0;
  for (int k = 0; k < h; ++k) p1.push_back({sel_blocks[k], 0});

  Circuit segment;
  segment.width = full.width;
  segment.registers = full.registers;
  segment.append(init);
  segment.append(oaa_circuit(w_final, p0, p1));
  return traced_channel_superop(segment, L.n);
}

// --- correlated-support engine -------------------------------------------

namespace {

// Slot-basis bookkeeping for the compressed engine: an orthonormal list of
// slot-ancilla vectors closed under the operators the evaluation needs.
struct SlotBasis {
  std::vector<Vector> vectors;     // orthonormal, D-dim
  std::vector<int> op_of_basis;    // -2 invalid, -1 identity, >=0 class id
  std::vector<Matrix> class_ops;   // on the state register
  std::vector<double> chi_coeffs;  // prep: e00 -> sum chi_coeffs[cl] basis
  std::vector<int> chi_targets;    // basis index per class
  Matrix close_matrix;             // V'_p^dag in this basis
  std::vector<bool> close_valid;   // columns where close_matrix is exact
  Matrix p0_matrix;                // ctrl-0 projector in this basis
};

int append_orthonormal(std::vector<Vector>& basis, const Vector& v,
                       double tol = 1e-10) {
  Vector residual = v;
  for (const auto& b : basis) residual -= b.dot(residual) * b;
  double norm = residual.norm();
  if (norm <= tol) return -1;
  basis.push_back(residual / norm);
  return static_cast<int>(basis.size()) - 1;
}

SlotBasis build_slot_basis(const Lindbladian& L,
                           const StructuredPurification& sp) {
  DerivedParams p = derived_params(L);
  const int A = sp.anc_width_total;
  const std::size_t D = std::size_t{1} << A;

  // Class enumeration over the support of chi.
  SlotBasis sb;
  const Eigen::Index sdim = Eigen::Index{1} << L.n;
  std::vector<int> class_of_state(D, -1);

  auto op_for_basis_state = [&](std::uint64_t idx) -> Matrix {
    Matrix op = Matrix::Identity(sdim, sdim);
    std::uint64_t sel1 = register_value(idx, A, sp.sel1);
    std::uint64_t sel2 = register_value(idx, A, sp.sel2);
    std::uint64_t c1 = register_value(idx, A, sp.c1);
    if (sel1 < static_cast<std::uint64_t>(p.q0)) {
      if (c1 == 1) {
        PauliTerm v = L.hamiltonian.terms[sel1].unit();
        v.phase = phase_multiply(v.phase, Phase::MinusI);
        op = to_dense(v) * op;
      }
      return op;
    }
    int j = static_cast<int>(sel1) - p.q0;
    if (j >= p.m) return op;
    const PauliSum& jump = L.jumps[j];
    int wj = jump_anc_width(jump);
    auto sub_value = [&](const Register& anc) -> std::uint64_t {
      if (wj == 0) return 0;
      std::uint64_t block = register_value(idx, A, anc);
      std::uint64_t low_mask = (std::uint64_t{1} << (anc.width - wj)) - 1;
      if (anc.width > wj && (block & low_mask) != 0)
        throw std::logic_error("ancilla sub-register misaligned");
      return block >> (anc.width - wj);
    };
    if (sel2 == 1) {
      std::uint64_t l = sub_value(sp.anc2);
      if (l >= jump.size()) throw std::logic_error("B support overflow");
      op = to_dense(jump.terms[l].unit()) * op;
    } else if (c1 == 1) {
      std::uint64_t l2 = sub_value(sp.anc2);
      std::uint64_t l1 = sub_value(sp.anc1);
      if (l1 >= jump.size() || l2 >= jump.size())
        throw std::logic_error("B support overflow");
      PauliTerm minus = jump.terms[l2].unit();
      minus.phase = phase_multiply(minus.phase, Phase::Minus);
      op = to_dense(jump.terms[l1].unit().adjoint()) * to_dense(minus) * op;
    }
    return op;
  };

  // Group chi's support into classes with equal induced operators.
  for (std::uint64_t idx = 0; idx < D; ++idx) {
    if (std::abs(sp.chi(static_cast<Eigen::Index>(idx))) < 1e-14) continue;
    Matrix op = op_for_basis_state(idx);
    int found = -1;
    for (std::size_t cl = 0; cl < sb.class_ops.size(); ++cl)
      if ((sb.class_ops[cl] - op).cwiseAbs().maxCoeff() < 1e-12) {
        found = static_cast<int>(cl);
        break;
      }
    if (found < 0) {
      sb.class_ops.push_back(op);
      found = static_cast<int>(sb.class_ops.size()) - 1;
    }
    class_of_state[idx] = found;
  }

  // Basis: e00 first, then the class-projected pieces of chi.
  Vector e00 = Vector::Zero(D);
  e00(0) = 1.0;
  sb.vectors.push_back(e00);
  sb.op_of_basis.push_back(-1);

  const int n_classes = static_cast<int>(sb.class_ops.size());
  sb.chi_coeffs.assign(n_classes, 0.0);
  sb.chi_targets.assign(n_classes, -1);
  for (int cl = 0; cl < n_classes; ++cl) {
    Vector piece = Vector::Zero(D);
    for (std::uint64_t idx = 0; idx < D; ++idx)
      if (class_of_state[idx] == cl)
        piece(static_cast<Eigen::Index>(idx)) =
            sp.chi(static_cast<Eigen::Index>(idx));
    double norm = piece.norm();
    if (norm < 1e-14) continue;
    sb.vectors.push_back(piece / norm);
    sb.op_of_basis.push_back(cl);
    sb.chi_coeffs[cl] = norm;
    sb.chi_targets[cl] = static_cast<int>(sb.vectors.size()) - 1;
  }

  // Dense (V'_p (G' (x) I))^dag on the ancilla space: the per-slot part
  // of the encoded rotation's inverse.
  EncodedPreparation ep = build_G_prime_Vp_prime(L, sp);
  Circuit prep_crc;
  prep_crc.width = A;
  {
    const Eigen::Index gdim = Eigen::Index{1} << (sp.sel1.width + 1);
    Matrix gcol = Matrix::Zero(gdim, 1);
    gcol.col(0) = ep.g_prime_column;
    prep_crc.add(
        {StatePrepGate{sp.sel_block, complete_unitary(gcol), false}, {}});
    prep_crc.gates.insert(prep_crc.gates.end(), ep.vp_prime.gates.begin(),
                          ep.vp_prime.gates.end());
  }
  Matrix u_close = circuit_unitary(prep_crc.inverse());

  // Closure: images of the chi pieces under the closure map, then the
  // ctrl-0 slices of everything.
  std::size_t chi_end = sb.vectors.size();
  for (std::size_t b = 1; b < chi_end; ++b) {
    Vector image = u_close * sb.vectors[b];
    if (append_orthonormal(sb.vectors, image) >= 0)
      sb.op_of_basis.push_back(-2);
  }
  std::vector<bool> ctrl_zero(D);
  for (std::uint64_t idx = 0; idx < D; ++idx)
    ctrl_zero[idx] = register_value(idx, A, sp.ctrl_block) == 0;
  for (std::size_t pass = 0; pass < 2; ++pass) {
    std::size_t count = sb.vectors.size();
    for (std::size_t b = 0; b < count; ++b) {
      Vector sliced = sb.vectors[b];
      for (std::uint64_t idx = 0; idx < D; ++idx)
        if (!ctrl_zero[idx]) sliced(static_cast<Eigen::Index>(idx)) = 0;
      if (append_orthonormal(sb.vectors, sliced) >= 0)
        sb.op_of_basis.push_back(-2);
    }
    if (sb.vectors.size() == count) break;
  }

  const int K = static_cast<int>(sb.vectors.size());
  if (K > 48)
    throw std::runtime_error("slot basis grew too large (" +
                             std::to_string(K) + " vectors)");

  // Projected operators, with closure checks.
  sb.close_matrix = Matrix::Zero(K, K);
  sb.close_valid.assign(K, false);
  for (int b = 0; b < K; ++b) {
    Vector image = u_close * sb.vectors[b];
    Vector coeffs(K);
    Vector residual = image;
    for (int c = 0; c < K; ++c) {
      coeffs(c) = sb.vectors[c].dot(image);
      residual -= coeffs(c) * sb.vectors[c];
    }
    if (residual.norm() < 1e-9) {
      sb.close_matrix.col(b) = coeffs;
      sb.close_valid[b] = true;
    }
  }
  sb.p0_matrix = Matrix::Zero(K, K);
  for (int b = 0; b < K; ++b) {
    Vector sliced = sb.vectors[b];
    for (std::uint64_t idx = 0; idx < D; ++idx)
      if (!ctrl_zero[idx]) sliced(static_cast<Eigen::Index>(idx)) = 0;
    Vector coeffs(K);
    Vector residual = sliced;
    for (int c = 0; c < K; ++c) {
      coeffs(c) = sb.vectors[c].dot(sliced);
      residual -= coeffs(c) * sb.vectors[c];
    }
    if (residual.norm() > 1e-9)
      throw std::runtime_error("slot basis not closed under the ctrl-0 slice");
    sb.p0_matrix.col(b) = coeffs;
  }
  return sb;
}

struct CompressedTensor {
  long long pos_dim = 0;
  int h = 0, K = 0, sdim = 0, radix = 0;
  std::vector<cd> data;

  long long size() const {
    long long s = pos_dim;
    for (int k = 0; k < h; ++k) s *= K;
    return s * sdim;
  }
  void allocate() { data.assign(size(), cd{0, 0}); }

  long long slot_stride(int k) const {
    long long s = sdim;
    for (int j = k + 1; j < h; ++j) s *= K;
    return s;
  }
  long long pos_stride() const {
    long long s = sdim;
    for (int j = 0; j < h; ++j) s *= K;
    return s;
  }
  int pos_value(long long pos_flat, int k) const {
    long long div = 1;
    for (int j = k + 1; j < h; ++j) div *= radix;
    return static_cast<int>((pos_flat / div) % radix);
  }
};

// The slot-k axis is walked as base + b * stride with base = outer * block
// + inner, outer < size/block, inner < stride; the state axis has stride 1
// and is the innermost.

// e00 -> sum of chi pieces on slots whose position fired.
void apply_prep(CompressedTensor& t, const SlotBasis& sb, int k, int r) {
  const long long stride = t.slot_stride(k);
  const long long block = stride * t.K;
  const long long n_outer = t.size() / block;
  for (long long outer = 0; outer < n_outer; ++outer) {
    const long long row = outer * block;
    const long long pos_flat = row / t.pos_stride();
    if (t.pos_value(pos_flat, k) >= r) continue;
    for (long long inner = 0; inner < stride; ++inner) {
      const long long base = row + inner;
      cd val = t.data[base];  // slot index 0 (e00)
      if (val == cd{0, 0}) continue;
      t.data[base] = 0;
      for (std::size_t cl = 0; cl < sb.class_ops.size(); ++cl) {
        int target = sb.chi_targets[cl];
        if (target >= 0)
          t.data[base + target * stride] += sb.chi_coeffs[cl] * val;
      }
    }
  }
}

void apply_vc(CompressedTensor& t, const SlotBasis& sb, int k, int r) {
  const long long stride = t.slot_stride(k);
  const long long block = stride * t.K;
  const long long n_outer = t.size() / block;
  const int sdim = t.sdim;
  Vector scratch(sdim);
  for (long long outer = 0; outer < n_outer; ++outer) {
    const long long row = outer * block;
    const long long pos_flat = row / t.pos_stride();
    if (t.pos_value(pos_flat, k) >= r) continue;
    for (long long inner = 0; inner < stride; inner += sdim) {
      for (int b = 0; b < t.K; ++b) {
        int op = sb.op_of_basis[b];
        if (op < 0) continue;  // identity or asserted-empty
        cd* chunk = t.data.data() + row + inner + b * stride;
        bool nonzero = false;
        for (int s = 0; s < sdim; ++s)
          if (chunk[s] != cd{0, 0}) {
            nonzero = true;
            break;
          }
        if (!nonzero) continue;
        for (int s = 0; s < sdim; ++s) scratch(s) = chunk[s];
        Vector res = sb.class_ops[op] * scratch;
        for (int s = 0; s < sdim; ++s) chunk[s] = res(s);
      }
    }
  }
}

// Contract the slot-k axis with a K x K matrix, optionally only where the
// position register fired.
void contract_slot(CompressedTensor& t, const Matrix& m, int k, int r,
                   bool conditioned) {
  const long long stride = t.slot_stride(k);
  const long long block = stride * t.K;
  const long long n_outer = t.size() / block;
  Vector in(t.K), out(t.K);
  for (long long outer = 0; outer < n_outer; ++outer) {
    const long long row = outer * block;
    if (conditioned) {
      const long long pos_flat = row / t.pos_stride();
      if (t.pos_value(pos_flat, k) >= r) continue;
    }
    for (long long inner = 0; inner < stride; ++inner) {
      const long long base = row + inner;
      for (int b = 0; b < t.K; ++b) in(b) = t.data[base + b * stride];
      out.noalias() = m * in;
      for (int b = 0; b < t.K; ++b) t.data[base + b * stride] = out(b);
    }
  }
}

// Dense matrix on the whole position axis (the E_std sandwich).
void apply_pos_matrix(CompressedTensor& t, const Matrix& m) {
  const long long rest = t.pos_stride();
  using RowMajor =
      Eigen::Matrix<cd, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<RowMajor> view(t.data.data(), t.pos_dim, rest);
  RowMajor result = m * view;
  view = result;
}

// The closure map is exact only on the columns the pipeline reaches;
// apply it with a leak check on everything else.
void apply_close(CompressedTensor& t, const SlotBasis& sb, int k, int r) {
  const long long stride = t.slot_stride(k);
  const long long block = stride * t.K;
  const long long n_outer = t.size() / block;
  Vector in(t.K), out(t.K);
  for (long long outer = 0; outer < n_outer; ++outer) {
    const long long row = outer * block;
    const long long pos_flat = row / t.pos_stride();
    if (t.pos_value(pos_flat, k) >= r) continue;
    for (long long inner = 0; inner < stride; ++inner) {
      const long long base = row + inner;
      for (int b = 0; b < t.K; ++b) {
        in(b) = t.data[base + b * stride];
        if (!sb.close_valid[b] && std::abs(in(b)) > 1e-9)
          throw std::runtime_error(
              "closure applied outside its validated columns");
      }
      out.noalias() = sb.close_matrix * in;
      for (int b = 0; b < t.K; ++b) t.data[base + b * stride] = out(b);
    }
  }
}

}  // namespace

Matrix algorithm2_segment_channel(const Lindbladian& L, double delta, int r,
                                  int h) {
  DerivedParams p = derived_params(L);
  StructuredPurification sp = build_structured_purification(L, delta);
  SlotBasis sb = build_slot_basis(L, sp);
  EncodedRotation enc = build_E_std(r, h, std::sqrt(sp.p_I), sp.lambda_star);

  const int sdim = 1 << L.n;
  CompressedTensor tensor;
  tensor.h = h;
  tensor.K = static_cast<int>(sb.vectors.size());
  tensor.sdim = sdim;
  tensor.radix = r + 1;
  tensor.pos_dim = 1;
  for (int k = 0; k < h; ++k) tensor.pos_dim *= tensor.radix;
  if (tensor.size() > (1LL << 27))
    throw std::invalid_argument(
        "compressed tensor too large: " + std::to_string(tensor.size()) +
        " amplitudes (positions " + std::to_string(tensor.pos_dim) +
        " x basis " + std::to_string(tensor.K) + "^" + std::to_string(h) +
        " x states " + std::to_string(sdim) + ")");

  // W applied to |Phi_init, e_i>: the encoded rotation (E_std, then the
  // conditioned preparations), the multiplexers, then the full encoded
  // rotation inverse (conditioned unpreparations, then E_std^dag). The
  // E_std sandwich is what recombines trivial and fired sectors into
  // coherent Kraus sums.
  auto apply_W = [&](int i) {
    CompressedTensor t = tensor;
    t.allocate();
    // positions all r, slots all e00, state e_i.
    const long long init_pos = tensor.pos_dim - 1;
    // E_std column from the ground state: position amplitudes.
    Vector col = enc.e_std.col(init_pos);
    for (long long g = 0; g < tensor.pos_dim; ++g) {
      if (col(g) == cd{0, 0}) continue;
      t.data[g * t.pos_stride() + i] = col(g);
    }
    for (int k = 0; k < h; ++k) apply_prep(t, sb, k, r);
    for (int k = 0; k < h; ++k) apply_vc(t, sb, k, r);
    for (int k = 0; k < h; ++k) apply_close(t, sb, k, r);
    apply_pos_matrix(t, enc.e_std.adjoint());
    return t;
  };

  // P0 on the ancilla block: position register back at |r...r| and every
  // slot's control parts at zero.
  auto project_p0 = [&](const CompressedTensor& x) {
    CompressedTensor out = x;
    const long long ps = out.pos_stride();
    const long long init_pos = out.pos_dim - 1;
    for (long long g = 0; g < out.pos_dim; ++g) {
      if (g == init_pos) continue;
      std::fill(out.data.begin() + g * ps, out.data.begin() + (g + 1) * ps,
                cd{0, 0});
    }
    for (int k = 0; k < h; ++k)
      contract_slot(out, sb.p0_matrix, k, 0, false);
    return out;
  };

  std::vector<CompressedTensor> m(sdim), pm(sdim);
  for (int i = 0; i < sdim; ++i) {
    m[i] = apply_W(i);
    pm[i] = project_p0(m[i]);
  }

  auto inner = [](const CompressedTensor& x, const CompressedTensor& y) {
    cd acc{0, 0};
    for (long long idx = 0; idx < x.size(); ++idx)
      acc += std::conj(x.data[idx]) * y.data[idx];
    return acc;
  };

  // Calibrate the amplified branch to amplitude 1/2 on the measured mean
  // good weight of this W.
  double kappa = 0;
  for (int i = 0; i < sdim; ++i) kappa += inner(pm[i], pm[i]).real();
  kappa /= sdim;
  if (kappa <= 0.25)
    throw std::invalid_argument(
        "good-branch weight below 1/4: amplification undefined");
  const double a = 0.5 / std::sqrt(kappa);

  // zeta_i(k) = <a_k | b_i> with b_i = a_i - 2 P0 a_i; the extra qubit
  // contributes a^2 to the projected part.
  Matrix g0(sdim, sdim), g1(sdim, sdim);
  for (int k = 0; k < sdim; ++k)
    for (int i = 0; i < sdim; ++i) {
      g0(k, i) = inner(m[k], m[i]);
      g1(k, i) = inner(m[k], pm[i]);
    }
  Matrix zeta(sdim, sdim);
  for (int k = 0; k < sdim; ++k)
    for (int i = 0; i < sdim; ++i)
      zeta(k, i) = g0(k, i) - 2.0 * a * a * g1(k, i);

  // F_i in the dictionary {m_k, pm_k} per extra-qubit branch.
  const double a1 = std::sqrt(1 - a * a);
  std::vector<Matrix> coeff_e0(sdim), coeff_e1(sdim);
  for (int i = 0; i < sdim; ++i) {
    Matrix c0 = Matrix::Zero(2, sdim);  // row 0: m coefficients, row 1: pm
    Matrix c1 = Matrix::Zero(2, sdim);
    for (int k = 0; k < sdim; ++k) {
      c0(0, k) = 2.0 * a * zeta(k, i) - (k == i ? a : 0.0);
      c1(0, k) = 2.0 * a1 * zeta(k, i) - (k == i ? a1 : 0.0);
    }
    c0(1, i) += 2.0 * a;
    coeff_e0[i] = std::move(c0);
    coeff_e1[i] = std::move(c1);
  }

  // tr_anc over (positions, slots) of pairwise outer products.
  auto traced_pair = [&](const CompressedTensor& x, const CompressedTensor& y) {
    Matrix out = Matrix::Zero(sdim, sdim);
    const long long blocks = x.size() / sdim;
    for (long long blk = 0; blk < blocks; ++blk) {
      const cd* xa = x.data.data() + blk * sdim;
      const cd* ya = y.data.data() + blk * sdim;
      for (int s = 0; s < sdim; ++s)
        for (int t = 0; t < sdim; ++t)
          out(s, t) += xa[s] * std::conj(ya[t]);
    }
    return out;
  };
  std::vector<std::vector<Matrix>> pair_trace(
      2 * sdim, std::vector<Matrix>(2 * sdim));
  auto dict = [&](int which, int k) -> const CompressedTensor& {
    return which == 0 ? m[k] : pm[k];
  };
  for (int x = 0; x < 2 * sdim; ++x)
    for (int y = 0; y < 2 * sdim; ++y)
      pair_trace[x][y] = traced_pair(dict(x / sdim, x % sdim),
                                     dict(y / sdim, y % sdim));

  Matrix superop = Matrix::Zero(sdim * sdim, sdim * sdim);
  for (int i = 0; i < sdim; ++i)
    for (int j = 0; j < sdim; ++j) {
      Matrix acc = Matrix::Zero(sdim, sdim);
      for (int branch = 0; branch < 2; ++branch) {
        const Matrix& ci = branch == 0 ? coeff_e0[i] : coeff_e1[i];
        const Matrix& cj = branch == 0 ? coeff_e0[j] : coeff_e1[j];
        for (int wx = 0; wx < 2; ++wx)
          for (int kx = 0; kx < sdim; ++kx) {
            cd cxi = ci(wx, kx);
            if (cxi == cd{0, 0}) continue;
            for (int wy = 0; wy < 2; ++wy)
              for (int ky = 0; ky < sdim; ++ky) {
                cd cyj = cj(wy, ky);
                if (cyj == cd{0, 0}) continue;
                acc += cxi * std::conj(cyj) *
                       pair_trace[wx * sdim + kx][wy * sdim + ky];
              }
          }
      }
      for (int s = 0; s < sdim; ++s)
        for (int t = 0; t < sdim; ++t)
          superop(s + t * sdim, i + j * sdim) = acc(s, t);
    }
  return superop;
}

Algorithm2Result run_algorithm2(const Lindbladian& L, double t, double eps,
                                const Matrix& rho0, int h_override,
                                int tau_override, int r_override) {
  DerivedParams p = derived_params(L);
  Segmentation seg = make_segmentation(p.lambda, t, eps);
  if (tau_override > 0) seg.tau = tau_override;
  if (r_override > 0) seg.r = r_override;
  if (seg.steps() > 0) seg.delta = t / (static_cast<double>(seg.tau) * seg.r);

  Algorithm2Result out;
  out.seg = seg;
  if (seg.steps() == 0) {
    out.rho = rho0;
    out.segment_superop =
        Matrix::Identity(rho0.rows() * rho0.rows(), rho0.rows() * rho0.rows());
    return out;
  }
  if (seg.r > 8)
    throw std::invalid_argument(
        "compressed engine caps r at 8 (requested r = " +
        std::to_string(seg.r) + "); loosen eps or shorten t");

  StructuredPurification sp = build_structured_purification(L, seg.delta);

  const int h_cap = std::min(seg.r, 3);
  int h = h_override;
  if (h <= 0) {
    h = h_cap;
    for (int candidate = 1; candidate <= h_cap; ++candidate) {
      EncodedRotation enc = build_E_std(seg.r, candidate, std::sqrt(sp.p_I),
                                        sp.lambda_star);
      if (enc.eps_enc <= eps / (2.0 * seg.tau)) {
        h = candidate;
        break;
      }
    }
  }
  if (h > h_cap)
    throw std::invalid_argument("cutoff h = " + std::to_string(h) +
                                " exceeds the engine cap " +
                                std::to_string(h_cap));
  out.h = h;
  EncodedRotation enc =
      build_E_std(seg.r, h, std::sqrt(sp.p_I), sp.lambda_star);
  out.eps_enc = enc.eps_enc;
  out.tail = enc.tail;

  out.segment_superop = algorithm2_segment_channel(L, seg.delta, seg.r, h);
  Vector v = vectorize(rho0);
  for (int k = 0; k < seg.tau; ++k) v = out.segment_superop * v;
  out.rho = unvectorize(v, rho0.rows());
  return out;
}

}  // namespace lindsim
