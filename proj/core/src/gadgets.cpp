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

#include "lindsim/gadgets.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "lindsim/rng.hpp"

namespace lindsim {

namespace {

int anc_width(const PauliSum& jump) {
  std::size_t terms = jump.size();
  if (terms <= 1) return 0;
  int w = 0;
  while ((std::size_t{1} << w) < terms) ++w;
  return w;
}

int max_anc_width(const Lindbladian& L) {
  int w = 0;
  for (const auto& j : L.jumps) w = std::max(w, anc_width(j));
  return w;
}

Matrix psd_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()));
  Vector vals = es.eigenvalues().cast<cd>();
  for (Eigen::Index k = 0; k < vals.size(); ++k) {
    double v = vals(k).real();
    vals(k) = std::sqrt(std::max(v, 0.0));
  }
  return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
}

struct SlotRegisters {
  Register sel;
  Register ctrl1, ctrl2, anc1, anc2;  // carved out of one control block
  Register block;                     // the whole control block
};

SlotRegisters carve_slot(const Register& sel, const Register& block, int w) {
  SlotRegisters s;
  s.sel = sel;
  s.block = block;
  s.ctrl1 = {block.name + ".c1", block.offset, 1, RegisterRole::Control};
  s.ctrl2 = {block.name + ".c2", block.offset + 1, 1, RegisterRole::Control};
  s.anc1 = {block.name + ".b1", block.offset + 2, w, RegisterRole::Control};
  s.anc2 = {block.name + ".b2", block.offset + 2 + w, w,
            RegisterRole::Control};
  return s;
}

std::vector<int> state_targets(const Register& state_reg) {
  std::vector<int> t(state_reg.width);
  for (int k = 0; k < state_reg.width; ++k) t[k] = state_reg.qubit(k);
  return t;
}

// Emits the F_l gadget: one tuning rotation on ctrl2, then the R_alpha
// sandwich around the controlled -i V_{0l}.
void emit_gadget_F(Circuit& c, const PauliTerm& h_term,
                   const GadgetParams& params, const SlotRegisters& regs,
                   const Register& state_reg) {
  c.add({RotationGate{regs.ctrl2.offset, params.tune_f}, {}});
  c.add({RotationGate{regs.ctrl1.offset, params.alpha}, {}});
  PauliTerm minus_i_v = h_term.unit();
  minus_i_v.phase = phase_multiply(minus_i_v.phase, Phase::MinusI);
  Gate controlled{PhasedPauliGate{minus_i_v, state_targets(state_reg)}, {}};
  controlled.controls.qubits.push_back({regs.ctrl1.offset, true});
  c.add(std::move(controlled));
  c.add({RotationGate{regs.ctrl1.offset, params.alpha}, {}});
}

Matrix b_prep_unitary(const PauliSum& jump, double cj, int w) {
  const Eigen::Index dim = Eigen::Index{1} << w;
  Matrix col = Matrix::Zero(dim, 1);
  for (std::size_t l = 0; l < jump.size(); ++l)
    col(static_cast<Eigen::Index>(l), 0) = std::sqrt(jump.terms[l].weight / cj);
  return complete_unitary(col);
}

// Emits the E_j gadget (nested LCU): tuning on ctrl2, R_alpha1 on sel,
// the R_alpha2 sandwich on ctrl1, B preparation on both ancilla blocks,
// and the three multiplexed Pauli legs.
void emit_gadget_E(Circuit& c, const PauliSum& jump, double cj,
                   const GadgetParams& params, const SlotRegisters& regs,
                   const Register& state_reg) {
  const int w = anc_width(jump);
  auto targets = state_targets(state_reg);

  c.add({RotationGate{regs.ctrl2.offset, params.tune_e}, {}});
  c.add({RotationGate{regs.sel.offset, params.alpha1}, {}});
  c.add({RotationGate{regs.ctrl1.offset, params.alpha2}, {}});

  Matrix b;
  if (w > 0) {
    b = b_prep_unitary(jump, cj, w);
    c.add({StatePrepGate{regs.anc1, b, false}, {}});
    c.add({StatePrepGate{regs.anc2, b, false}, {}});
  }

  auto leg = [&](const Register& selector, Phase extra, bool adjoint,
                 ControlSpec controls) {
    std::vector<PauliTerm> branches;
    branches.reserve(jump.size());
    for (const auto& term : jump.terms) {
      PauliTerm unit = adjoint ? term.unit().adjoint() : term.unit();
      unit.phase = phase_multiply(unit.phase, extra);
      branches.push_back(std::move(unit));
    }
    if (w > 0) {
      c.add({BinaryMultiplexerGate{selector, std::move(branches), targets},
             std::move(controls)});
    } else {
      c.add({PhasedPauliGate{branches[0], targets}, std::move(controls)});
    }
  };

  ControlSpec on_jump;  // sel = 1
  on_jump.qubits.push_back({regs.sel.offset, true});
  leg(regs.anc2, Phase::Plus, false, on_jump);

  ControlSpec on_damp;  // sel = 0, ctrl1 = 1
  on_damp.qubits.push_back({regs.sel.offset, false});
  on_damp.qubits.push_back({regs.ctrl1.offset, true});
  leg(regs.anc2, Phase::Minus, false, on_damp);
  leg(regs.anc1, Phase::Plus, true, on_damp);

  c.add({RotationGate{regs.ctrl1.offset, params.alpha2}, {}});
  if (w > 0) {
    c.add({StatePrepGate{regs.anc1, b, true}, {}});
    c.add({StatePrepGate{regs.anc2, b, true}, {}});
  }
}

void emit_gadget(Circuit& c, int channel_index, const Lindbladian& L,
                 const DerivedParams& p, const GadgetParams& params,
                 const SlotRegisters& regs, const Register& state_reg) {
  if (channel_index < p.q0) {
    emit_gadget_F(c, L.hamiltonian.terms[channel_index], params, regs,
                  state_reg);
  } else {
    int j = channel_index - p.q0;
    emit_gadget_E(c, L.jumps[j], p.c[j], params, regs, state_reg);
  }
}

}  // namespace

GadgetParams compute_gadget_params(double lambda, double delta) {
  GadgetParams g;
  g.lambda_delta = lambda * delta;
  const double ld = g.lambda_delta;
  if (ld <= 0 || ld >= 0.5)
    throw std::invalid_argument("gadget angles need 0 < lambda*delta < 1/2");
  g.p_target = 1.0 - 2.0 * ld;

  g.alpha = std::atan(ld);
  g.p1 = 1.0 / ((1.0 + ld) * (1.0 + ld));
  g.beta1 = std::atan(std::sqrt(g.p1 / g.p_target) - 1.0);
  g.tune_f = std::atan(g.p1 / g.p_target - 1.0);

  double half = 1.0 + ld / 2.0;
  g.alpha1 = std::atan(ld / (half * half));
  g.alpha2 = std::atan(ld / 2.0);
  g.p2 = 1.0 / (ld + half * half);
  g.beta2 = std::atan(std::sqrt(g.p2 / g.p_target) - 1.0);
  g.tune_e = std::atan(g.p2 / g.p_target - 1.0);
  return g;
}

PurificationCircuit gadget_F(int l, const Lindbladian& L, double delta,
                             double p_target) {
  DerivedParams p = derived_params(L);
  if (l < 0 || l >= p.q0) throw std::out_of_range("Hamiltonian term index");
  GadgetParams params = compute_gadget_params(p.lambda, delta);
  if (p_target > params.p1)
    throw std::invalid_argument("p_target exceeds the raw probability p1");
  params.p_target = p_target;
  params.tune_f = std::atan(params.p1 / p_target - 1.0);

  PurificationCircuit out;
  out.channel_index = l;
  out.n_kraus = 1;
  out.p = p_target;
  Circuit& c = out.circuit;
  out.sel = c.add_register("sel", 1, RegisterRole::Selection);
  Register block = c.add_register("ctrl", 2, RegisterRole::Control);
  out.state_reg = c.add_register("state", L.n, RegisterRole::State);
  SlotRegisters regs = carve_slot(out.sel, block, 0);
  out.ctrl = {block};
  emit_gadget_F(c, L.hamiltonian.terms[l], params, regs, out.state_reg);
  return out;
}

PurificationCircuit gadget_E(int j, const Lindbladian& L, double delta,
                             double p_target) {
  DerivedParams p = derived_params(L);
  if (j < 0 || j >= p.m) throw std::out_of_range("jump index");
  GadgetParams params = compute_gadget_params(p.lambda, delta);
  if (p_target > params.p2)
    throw std::invalid_argument("p_target exceeds the raw probability p2");
  params.p_target = p_target;
  params.tune_e = std::atan(params.p2 / p_target - 1.0);

  PurificationCircuit out;
  out.channel_index = p.q0 + j;
  out.n_kraus = 2;
  out.p = p_target;
  Circuit& c = out.circuit;
  const int w = anc_width(L.jumps[j]);
  out.sel = c.add_register("sel", 1, RegisterRole::Selection);
  Register block = c.add_register("ctrl", 2 + 2 * w, RegisterRole::Control);
  out.state_reg = c.add_register("state", L.n, RegisterRole::State);
  SlotRegisters regs = carve_slot(out.sel, block, w);
  out.ctrl = {block};
  emit_gadget_E(c, L.jumps[j], p.c[j], params, regs, out.state_reg);
  return out;
}

Matrix purified_channel_superop(const PurificationCircuit& gadget, int n) {
  const Circuit& c = gadget.circuit;
  const Eigen::Index d = Eigen::Index{1} << n;
  // Columns of the circuit from |0_anc, e_i>, projected on ctrl = 0.
  std::vector<State> cols;
  cols.reserve(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    State s = make_basis_state(c.width, static_cast<std::uint64_t>(i));
    simulate(c, s);
    for (std::uint64_t idx = 0; idx < s.size(); ++idx) {
      for (const auto& reg : gadget.ctrl)
        if (register_value(idx, c.width, reg) != 0) {
          s[idx] = 0;
          break;
        }
    }
    cols.push_back(std::move(s));
  }
  Matrix superop = Matrix::Zero(d * d, d * d);
  const std::uint64_t blocks = std::uint64_t{1} << (c.width - n);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      for (std::uint64_t b = 0; b < blocks; ++b) {
        const cd* xi = cols[i].data() + b * d;
        const cd* xj = cols[j].data() + b * d;
        for (Eigen::Index s = 0; s < d; ++s)
          for (Eigen::Index t = 0; t < d; ++t)
            superop(s + t * d, i + j * d) += xi[s] * std::conj(xj[t]);
      }
  return superop;
}

namespace {

// Good block <0_ctrl| U |0_ctrl> of a standalone gadget, as an operator on
// (sel (x) state); feeds the one-ancilla dilation.
Matrix gadget_good_block(const PurificationCircuit& gadget, int n) {
  const Circuit& c = gadget.circuit;
  const Eigen::Index ds = Eigen::Index{1} << n;
  const Eigen::Index dim = 2 * ds;  // sel (x) state
  const int cw = gadget.ctrl.front().width;
  Matrix g(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    Eigen::Index j = col / ds, s = col % ds;
    std::uint64_t idx =
        (static_cast<std::uint64_t>(j) << (cw + n)) | static_cast<std::uint64_t>(s);
    State out = make_basis_state(c.width, idx);
    simulate(c, out);
    for (Eigen::Index row = 0; row < dim; ++row) {
      Eigen::Index jr = row / ds, sr = row % ds;
      std::uint64_t ridx = (static_cast<std::uint64_t>(jr) << (cw + n)) |
                           static_cast<std::uint64_t>(sr);
      g(row, col) = out[ridx];
    }
  }
  return g;
}

Matrix halmos_dilation(const Matrix& g) {
  const Eigen::Index d = g.rows();
  Matrix u(2 * d, 2 * d);
  u.topLeftCorner(d, d) = g;
  u.topRightCorner(d, d) = psd_sqrt(Matrix::Identity(d, d) - g * g.adjoint());
  u.bottomLeftCorner(d, d) =
      psd_sqrt(Matrix::Identity(d, d) - g.adjoint() * g);
  u.bottomRightCorner(d, d) = -g.adjoint();
  return u;
}

}  // namespace

SimulationW build_W(const std::vector<int>& indices, const Lindbladian& L,
                    double delta, GadgetForm form) {
  DerivedParams p = derived_params(L);
  GadgetParams params = compute_gadget_params(p.lambda, delta);
  const int r = static_cast<int>(indices.size());
  const int w = max_anc_width(L);
  const int full_ctrl_width = 2 + 2 * w;

  if (form == GadgetForm::Auto) {
    int full_width = 1 + r * (1 + full_ctrl_width) + L.n;
    form = (full_width <= std::min(simulator_qubit_cap(), 16))
               ? GadgetForm::Full
               : GadgetForm::Dilated;
  }
  const int ctrl_width = (form == GadgetForm::Full) ? full_ctrl_width : 1;
  const int total = 1 + r * (1 + ctrl_width) + L.n;
  if (total > simulator_qubit_cap())
    throw std::invalid_argument(
        "register budget exceeded: 1 (extra) + " + std::to_string(r) +
        "*(1 sel + " + std::to_string(ctrl_width) + " ctrl) + " +
        std::to_string(L.n) + " state = " + std::to_string(total) +
        " qubits > cap " + std::to_string(simulator_qubit_cap()) +
        "; reduce r or q, use the dilated form, or raise LINDSIM_QUBIT_CAP");

  SimulationW out;
  out.indices = indices;
  out.r = r;
  out.n = L.n;
  out.p = params.p_target;
  out.form = form;

  Circuit& c = out.circuit;
  out.extra = c.add_register("extra", 1, RegisterRole::Extra);
  for (int k = 0; k < r; ++k) {
    out.sels.push_back(
        c.add_register("sel" + std::to_string(k), 1, RegisterRole::Selection));
    out.ctrls.push_back(c.add_register("ctrl" + std::to_string(k), ctrl_width,
                                       RegisterRole::Control));
  }
  out.state_reg = c.add_register("state", L.n, RegisterRole::State);

  double pr = std::pow(out.p, r);
  if (pr <= 0.25)
    throw std::invalid_argument("p^r <= 1/4: extra rotation undefined");
  double a = 0.5 / std::sqrt(pr);
  Matrix extra_rot(2, 2);
  extra_rot << a, std::sqrt(1 - a * a), std::sqrt(1 - a * a), -a;
  c.add({DenseUnitaryGate{{out.extra}, {2}, extra_rot, false}, {}});

  if (form == GadgetForm::Full) {
    for (int k = 0; k < r; ++k) {
      SlotRegisters regs = carve_slot(out.sels[k], out.ctrls[k], w);
      emit_gadget(c, indices[k], L, p, params, regs, out.state_reg);
    }
  } else {
    // One-ancilla unitary dilation of each gadget's good block. The good
    // blocks match the full gadgets exactly, and the OAA deviation depends
    // only on good blocks, so this form is interchangeable with Full.
    for (int k = 0; k < r; ++k) {
      PurificationCircuit gadget =
          indices[k] < p.q0
              ? gadget_F(indices[k], L, delta, params.p_target)
              : gadget_E(indices[k] - p.q0, L, delta, params.p_target);
      Matrix u = halmos_dilation(gadget_good_block(gadget, L.n));
      c.add({DenseUnitaryGate{{out.ctrls[k], out.sels[k], out.state_reg},
                              {2, 2, std::uint64_t{1} << L.n},
                              std::move(u),
                              false},
             {}});
    }
  }
  return out;
}

std::vector<SubspaceTerm> projector_P0(const SimulationW& w) {
  std::vector<SubspaceTerm> terms;
  terms.push_back({w.extra, 0});
  for (const auto& ctrl : w.ctrls) terms.push_back({ctrl, 0});
  return terms;
}

std::vector<SubspaceTerm> projector_P1(const SimulationW& w) {
  std::vector<SubspaceTerm> terms = projector_P0(w);
  for (const auto& sel : w.sels) terms.push_back({sel, 0});
  return terms;
}

Circuit oaa_circuit(const Circuit& w, const std::vector<SubspaceTerm>& p0,
                    const std::vector<SubspaceTerm>& p1) {
  Circuit f;
  f.width = w.width;
  f.registers = w.registers;
  f.append(w);
  f.add({ReflectionGate{p0}, {}});
  f.append(w.inverse());
  f.add({ReflectionGate{p1}, {}});
  f.append(w);
  f.add({GlobalPhaseGate{cd{-1.0, 0.0}}, {}});
  return f;
}

Circuit oaa(const SimulationW& w) {
  return oaa_circuit(w.circuit, projector_P0(w), projector_P1(w));
}

namespace {

std::vector<std::vector<Matrix>> kraus_by_channel(const Lindbladian& L,
                                                  double delta) {
  auto channels = build_individual_channels(L, delta);
  std::vector<std::vector<Matrix>> out;
  out.reserve(channels.size());
  for (auto& ch : channels) out.push_back(std::move(ch.kraus));
  return out;
}

}  // namespace

State lemma4_target_state(const SimulationW& w, const Lindbladian& L,
                          double delta, const Vector& psi) {
  auto kraus = kraus_by_channel(L, delta);
  const Eigen::Index d = Eigen::Index{1} << w.n;
  State phi(std::size_t{1} << w.circuit.width, cd{0, 0});

  std::vector<int> branch(w.r, 0);
  for (;;) {
    Vector v = psi;
    std::uint64_t sel_bits = 0;
    for (int k = 0; k < w.r; ++k) {
      v = kraus[w.indices[k]][branch[k]] * v;
      std::uint64_t shift = w.circuit.width - w.sels[k].offset - 1;
      sel_bits |= static_cast<std::uint64_t>(branch[k]) << shift;
    }
    for (Eigen::Index s = 0; s < d; ++s)
      phi[sel_bits | static_cast<std::uint64_t>(s)] += v(s);

    int k = w.r - 1;
    while (k >= 0) {
      if (++branch[k] <
          static_cast<int>(kraus[w.indices[k]].size())) break;
      branch[k] = 0;
      --k;
    }
    if (k < 0) break;
  }
  return phi;
}

double lemma4_deviation(const SimulationW& w, const Lindbladian& L,
                        double delta, const Vector& psi) {
  Circuit f = oaa(w);
  State input(std::size_t{1} << f.width, cd{0, 0});
  for (Eigen::Index s = 0; s < psi.size(); ++s) input[s] = psi(s);
  State result = std::move(input);
  simulate(f, result);
  State target = lemma4_target_state(w, L, delta, psi);
  double norm2 = 0;
  for (std::size_t idx = 0; idx < result.size(); ++idx)
    norm2 += std::norm(result[idx] - target[idx]);
  return std::sqrt(norm2);
}

double lemma4_deviation_oracle(const std::vector<int>& indices,
                               const Lindbladian& L, double delta,
                               const Vector& psi) {
  auto kraus = kraus_by_channel(L, delta);
  const Eigen::Index d = psi.size();
  Matrix m = Matrix::Identity(d, d);
  for (int idx : indices) {
    Matrix next = Matrix::Zero(d, d);
    for (const auto& a : kraus[idx]) next += a.adjoint() * m * a;
    m = std::move(next);
  }
  return ((Matrix::Identity(d, d) - m) * psi).norm();
}

Matrix traced_channel_superop(const Circuit& circuit, int n_state) {
  const Eigen::Index d = Eigen::Index{1} << n_state;
  std::vector<State> cols;
  cols.reserve(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    State s = make_basis_state(circuit.width, static_cast<std::uint64_t>(i));
    simulate(circuit, s);
    cols.push_back(std::move(s));
  }
  Matrix superop = Matrix::Zero(d * d, d * d);
  const std::uint64_t blocks = std::uint64_t{1} << (circuit.width - n_state);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      for (std::uint64_t b = 0; b < blocks; ++b) {
        const cd* xi = cols[i].data() + b * d;
        const cd* xj = cols[j].data() + b * d;
        for (Eigen::Index s = 0; s < d; ++s)
          for (Eigen::Index t = 0; t < d; ++t)
            superop(s + t * d, i + j * d) += xi[s] * std::conj(xj[t]);
      }
  return superop;
}

Matrix algorithm1_segment_channel(const std::vector<int>& indices,
                                  const Lindbladian& L, double delta,
                                  GadgetForm form) {
  SimulationW w = build_W(indices, L, delta, form);
  return traced_channel_superop(oaa(w), L.n);
}

Algorithm1Result run_algorithm1(const Lindbladian& L, double t, double eps,
                                const Matrix& rho0, int n_samples,
                                std::uint64_t seed, GadgetForm form,
                                int tau_override, int r_override) {
  if (n_samples <= 0) throw std::invalid_argument("need at least one sample");
  DerivedParams p = derived_params(L);
  ChannelMixture mix = mixture_distribution(L);
  Segmentation seg = make_segmentation(p.lambda, t, eps);
  if (tau_override > 0) seg.tau = tau_override;
  if (r_override > 0) seg.r = r_override;
  if (seg.steps() > 0) seg.delta = t / (static_cast<double>(seg.tau) * seg.r);

  Algorithm1Result out;
  out.seg = seg;
  out.n_samples = n_samples;
  const Eigen::Index d = rho0.rows();
  if (seg.steps() == 0) {
    out.rho = rho0;
    out.stderr_abs = Matrix::Zero(d, d);
    return out;
  }

  Matrix mean = Matrix::Zero(d, d);
  Matrix m2_re = Matrix::Zero(d, d);
  Matrix m2_im = Matrix::Zero(d, d);

  for (int sample = 0; sample < n_samples; ++sample) {
    Philox rng(seed, static_cast<std::uint64_t>(sample));
    std::vector<int> string(seg.steps());
    for (int k = 0; k < seg.steps(); ++k)
      string[k] = static_cast<int>(rng.categorical(mix.weights));

    Matrix rho = rho0;
    for (int k1 = 0; k1 < seg.tau; ++k1) {
      std::vector<int> segment(string.begin() + k1 * seg.r,
                               string.begin() + (k1 + 1) * seg.r);
      SimulationW w = build_W(segment, L, seg.delta, form);
      out.form = w.form;
      Circuit f = oaa(w);

      // Feed the (generally mixed) state through via its eigensystem.
      Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()));
      Matrix next = Matrix::Zero(d, d);
      for (Eigen::Index e = 0; e < d; ++e) {
        double weight = es.eigenvalues()(e);
        if (weight < 1e-14) continue;
        State input(std::size_t{1} << f.width, cd{0, 0});
        for (Eigen::Index s = 0; s < d; ++s)
          input[s] = es.eigenvectors()(s, e);
        State evolved = std::move(input);
        simulate(f, evolved);
        next += weight * trace_out_upper(evolved, f.width, L.n);
      }
      rho = next;
    }

    Matrix delta_m = rho - mean;
    mean += delta_m / static_cast<double>(sample + 1);
    Matrix delta2 = rho - mean;
    m2_re += delta_m.real().cwiseProduct(delta2.real()).cast<cd>();
    m2_im += delta_m.imag().cwiseProduct(delta2.imag()).cast<cd>();
  }

  out.rho = mean;
  out.stderr_abs = Matrix::Zero(d, d);
  if (n_samples > 1) {
    double denom = static_cast<double>(n_samples) *
                   static_cast<double>(n_samples - 1);
    for (Eigen::Index r = 0; r < d; ++r)
      for (Eigen::Index c = 0; c < d; ++c)
        out.stderr_abs(r, c) = std::sqrt(
            (m2_re(r, c).real() + m2_im(r, c).real()) / denom);
  }
  return out;
}

}  // namespace lindsim
