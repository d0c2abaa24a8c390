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

#include "lindsim/trajectory.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "lindsim/rng.hpp"

namespace lindsim {

namespace {

double operator_norm(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().maxCoeff();
}

}  // namespace

std::vector<IndividualChannel> build_individual_channels(const Lindbladian& L,
                                                         double delta) {
  DerivedParams p = derived_params(L);
  const double ld = p.lambda * delta;
  if (ld >= 0.5)
    throw std::invalid_argument("lambda*delta = " + std::to_string(ld) +
                                " too large; need lambda*delta < 1/2");
  const Eigen::Index d = Eigen::Index{1} << L.n;
  const Matrix id = Matrix::Identity(d, d);
  const cd i{0.0, 1.0};

  std::vector<IndividualChannel> channels;
  channels.reserve(p.q0 + p.m);
  int l = 0;
  for (const auto& term : L.hamiltonian.terms) {
    Matrix v = to_dense(term.unit());
    IndividualChannel ch;
    ch.kind = IndividualChannel::Kind::Hamiltonian;
    ch.index = l++;
    ch.kraus.push_back(id - i * ld * v);
    Matrix defect = ch.kraus[0].adjoint() * ch.kraus[0] - id;
    ch.trace_defect = operator_norm(defect);
    channels.push_back(std::move(ch));
  }
  for (int j = 0; j < p.m; ++j) {
    Matrix lj = L.jumps[j].to_dense();
    double cj2 = p.c[j] * p.c[j];
    Matrix ldl = lj.adjoint() * lj;
    IndividualChannel ch;
    ch.kind = IndividualChannel::Kind::Jump;
    ch.index = j;
    ch.kraus.push_back(id - (ld / (2 * cj2)) * ldl);
    ch.kraus.push_back(std::sqrt(ld / cj2) * lj);
    Matrix defect = ch.kraus[0].adjoint() * ch.kraus[0] +
                    ch.kraus[1].adjoint() * ch.kraus[1] - id;
    ch.trace_defect = operator_norm(defect);
    channels.push_back(std::move(ch));
  }
  return channels;
}

ChannelRep mixture_channel(const Lindbladian& L, double delta) {
  ChannelMixture mix = mixture_distribution(L);
  auto channels = build_individual_channels(L, delta);
  const Eigen::Index d = Eigen::Index{1} << L.n;
  Matrix s = Matrix::Zero(d * d, d * d);
  for (std::size_t k = 0; k < channels.size(); ++k)
    s += mix.weights[k] * kraus_to_superop(channels[k].kraus);
  return ChannelRep::from_superop(std::move(s));
}

double remainder_identity_check(const Lindbladian& L, double delta) {
  DerivedParams p = derived_params(L);
  const Eigen::Index d = Eigen::Index{1} << L.n;

  Matrix mixture = mixture_channel(L, delta).superop();
  Matrix first_order = first_order_map(L, delta).superop();

  Matrix remainder = Matrix::Zero(d * d, d * d);
  for (const auto& term : L.hamiltonian.terms) {
    Matrix v = to_dense(term.unit());
    remainder += term.weight * kron(v.conjugate(), v);
  }
  for (int j = 0; j < p.m; ++j) {
    Matrix ldl = L.jumps[j].to_dense().adjoint() * L.jumps[j].to_dense();
    remainder += 0.25 / (p.c[j] * p.c[j]) * kron(ldl.conjugate(), ldl);
  }

  Matrix residual =
      mixture - first_order - p.lambda * delta * delta * remainder;
  return residual.cwiseAbs().maxCoeff();
}

Segmentation make_segmentation(double lambda, double t, double eps) {
  if (t < 0) throw std::invalid_argument("negative evolution time");
  if (eps <= 0) throw std::invalid_argument("precision must be positive");
  Segmentation seg;
  if (t == 0 || lambda == 0) return seg;
  seg.tau = static_cast<int>(std::ceil(2.0 * lambda * t));
  double ratio = static_cast<double>(seg.tau) / eps;
  int log2r = std::max(0, static_cast<int>(std::ceil(std::log2(ratio))));
  seg.r = 1 << log2r;
  seg.delta = t / (static_cast<double>(seg.tau) * seg.r);
  return seg;
}

ChannelEvolveResult evolve_channel_level(const Lindbladian& L, double t,
                                         double eps, const Matrix& rho0) {
  DerivedParams p = derived_params(L);
  Segmentation seg = make_segmentation(p.lambda, t, eps);
  ChannelEvolveResult result{rho0, 0.0, seg};
  if (seg.steps() == 0) return result;

  Matrix s = mixture_channel(L, seg.delta).superop();
  Vector v = vectorize(rho0);
  for (int k = 0; k < seg.steps(); ++k) v = s * v;
  result.rho = unvectorize(v, rho0.rows());
  result.trace_defect = std::abs(result.rho.trace().real() - 1.0) +
                        std::abs(result.rho.trace().imag());
  return result;
}

std::vector<double> trajectory_step_probabilities(const Lindbladian& L,
                                                  const Vector& psi,
                                                  double delta) {
  const Eigen::Index d = Eigen::Index{1} << L.n;
  const cd i{0.0, 1.0};
  Matrix h_eff = L.hamiltonian.to_dense();
  Matrix damping = Matrix::Zero(d, d);
  for (const auto& jump : L.jumps) {
    Matrix lj = jump.to_dense();
    damping += lj.adjoint() * lj;
  }
  h_eff -= 0.5 * i * damping;

  std::vector<double> probs;
  probs.reserve(1 + L.jumps.size());
  Vector phi0 = psi - i * delta * (h_eff * psi);
  probs.push_back(phi0.squaredNorm());
  for (const auto& jump : L.jumps) {
    Vector phij = jump.to_dense() * psi;
    probs.push_back(delta * phij.squaredNorm());
  }
  return probs;
}

MonteCarloResult evolve_monte_carlo(const Lindbladian& L, double t, double eps,
                                    const Vector& psi0,
                                    std::uint64_t n_traj,
                                    std::uint64_t seed) {
  if (std::abs(psi0.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("initial state must be normalized");
  if (n_traj == 0) throw std::invalid_argument("need at least one trajectory");

  DerivedParams p = derived_params(L);
  Segmentation seg = make_segmentation(p.lambda, t, eps);
  const Eigen::Index d = psi0.size();
  const cd im{0.0, 1.0};

  // Precompute dense stepping operators; systems here are small.
  Matrix h_eff = L.hamiltonian.to_dense();
  Matrix damping = Matrix::Zero(d, d);
  std::vector<Matrix> jump_ops;
  jump_ops.reserve(L.jumps.size());
  for (const auto& jump : L.jumps) {
    jump_ops.push_back(jump.to_dense());
    damping += jump_ops.back().adjoint() * jump_ops.back();
  }
  h_eff -= 0.5 * im * damping;
  Matrix no_jump = Matrix::Identity(d, d) - im * seg.delta * h_eff;

  Matrix mean = Matrix::Zero(d, d);
  Matrix m2_re = Matrix::Zero(d, d);
  Matrix m2_im = Matrix::Zero(d, d);
  std::vector<double> probs(1 + jump_ops.size());

  for (std::uint64_t traj = 0; traj < n_traj; ++traj) {
    Philox rng(seed, traj);
    Vector psi = psi0;
    for (int step = 0; step < seg.steps(); ++step) {
      Vector phi0 = no_jump * psi;
      probs[0] = phi0.squaredNorm();
      for (std::size_t j = 0; j < jump_ops.size(); ++j)
        probs[1 + j] = seg.delta * (jump_ops[j] * psi).squaredNorm();
      std::size_t pick = rng.categorical(probs);
      if (probs[pick] <= 0.0)
        throw std::runtime_error("degenerate step: delta too large");
      if (pick == 0) {
        psi = phi0 / std::sqrt(probs[0]);
      } else {
        Vector phij = jump_ops[pick - 1] * psi;
        psi = phij / phij.norm();
      }
    }
    // Welford accumulation per matrix entry, trajectory order fixed.
    Matrix proj = psi * psi.adjoint();
    Matrix delta_m = proj - mean;
    mean += delta_m / static_cast<double>(traj + 1);
    Matrix delta2 = proj - mean;
    m2_re += delta_m.real().cwiseProduct(delta2.real()).cast<cd>();
    m2_im += delta_m.imag().cwiseProduct(delta2.imag()).cast<cd>();
  }

  MonteCarloResult result;
  result.rho = mean;
  result.seg = seg;
  result.n_traj = n_traj;
  result.stderr_abs = Matrix::Zero(d, d);
  if (n_traj > 1) {
    double denom = static_cast<double>(n_traj) *
                   static_cast<double>(n_traj - 1);
    for (Eigen::Index r = 0; r < d; ++r)
      for (Eigen::Index c = 0; c < d; ++c) {
        double var_re = m2_re(r, c).real() / denom;
        double var_im = m2_im(r, c).real() / denom;
        result.stderr_abs(r, c) = std::sqrt(var_re + var_im);
      }
  }
  return result;
}

}  // namespace lindsim
