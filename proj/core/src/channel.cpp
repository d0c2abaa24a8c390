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

#include "lindsim/channel.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

namespace lindsim {

Vector vectorize(const Matrix& rho) {
  return Eigen::Map<const Vector>(rho.data(), rho.size());
}

Matrix unvectorize(const Vector& v, Eigen::Index d) {
  if (v.size() != d * d) throw std::invalid_argument("unvectorize: bad size");
  return Eigen::Map<const Matrix>(v.data(), d, d);
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ChannelRep ChannelRep::from_superop(Matrix superop) {
  auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(
      static_cast<double>(superop.rows()))));
  if (d * d != superop.rows() || superop.rows() != superop.cols())
    throw std::invalid_argument("superoperator must be d^2 x d^2");
  ChannelRep rep;
  rep.d_ = d;
  rep.superop_ = std::move(superop);
  return rep;
}

ChannelRep ChannelRep::from_kraus(std::vector<Matrix> kraus) {
  if (kraus.empty()) throw std::invalid_argument("empty Kraus list");
  Eigen::Index d = kraus.front().rows();
  for (const auto& k : kraus)
    if (k.rows() != d || k.cols() != d)
      throw std::invalid_argument("Kraus operators must be square, equal dim");
  ChannelRep rep;
  rep.d_ = d;
  rep.superop_ = kraus_to_superop(kraus);
  rep.kraus_ = std::move(kraus);
  return rep;
}

ChannelRep ChannelRep::from_choi(Matrix choi, Eigen::Index d) {
  if (choi.rows() != d * d || choi.cols() != d * d)
    throw std::invalid_argument("Choi matrix must be d^2 x d^2");
  ChannelRep rep;
  rep.d_ = d;
  rep.choi_ = std::move(choi);
  return rep;
}

ChannelRep ChannelRep::identity(Eigen::Index d) {
  return from_superop(Matrix::Identity(d * d, d * d));
}

const Matrix& ChannelRep::superop() const {
  if (!superop_) superop_ = choi_to_superop(*choi_, d_);
  return *superop_;
}

const Matrix& ChannelRep::choi() const {
  if (!choi_) choi_ = superop_to_choi(superop(), d_);
  return *choi_;
}

const std::vector<Matrix>& ChannelRep::kraus(double threshold) const {
  if (!kraus_) {
    // Choi eigendecomposition; eigenvectors reshape to Kraus operators.
    Eigen::SelfAdjointEigenSolver<Matrix> es(
        0.5 * (choi() + choi().adjoint()));
    std::vector<Matrix> ops;
    for (Eigen::Index k = choi().rows() - 1; k >= 0; --k) {
      double eval = es.eigenvalues()(k);
      if (eval <= threshold) continue;
      Vector col = std::sqrt(eval) * es.eigenvectors().col(k);
      // J[i*d+a, ...] column entries: component (i, a) -> K(i, a).
      Matrix op(d_, d_);
      for (Eigen::Index i = 0; i < d_; ++i)
        for (Eigen::Index a = 0; a < d_; ++a) op(i, a) = col(i * d_ + a);
      ops.push_back(std::move(op));
    }
    if (ops.empty()) ops.push_back(Matrix::Zero(d_, d_));
    kraus_ = std::move(ops);
  }
  return *kraus_;
}

Matrix ChannelRep::apply(const Matrix& rho) const {
  return unvectorize(superop() * vectorize(rho), d_);
}

double ChannelRep::cp_defect() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (choi() + choi().adjoint()));
  double lo = es.eigenvalues().minCoeff();
  return lo < 0 ? -lo : 0.0;
}

double ChannelRep::tp_defect() const {
  const Matrix& j = choi();
  Matrix reduced = Matrix::Zero(d_, d_);
  for (Eigen::Index a = 0; a < d_; ++a)
    for (Eigen::Index b = 0; b < d_; ++b)
      for (Eigen::Index i = 0; i < d_; ++i)
        reduced(a, b) += j(i * d_ + a, i * d_ + b);
  return (reduced - Matrix::Identity(d_, d_)).cwiseAbs().maxCoeff();
}

bool ChannelRep::is_cptp(double tol) const {
  return cp_defect() <= tol && tp_defect() <= tol;
}

Matrix superop_to_choi(const Matrix& superop, Eigen::Index d) {
  Matrix j(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index k = 0; k < d; ++k)
        for (Eigen::Index b = 0; b < d; ++b)
          j(i * d + a, k * d + b) = superop(i + k * d, a + b * d);
  return j;
}

Matrix choi_to_superop(const Matrix& choi, Eigen::Index d) {
  Matrix s(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index k = 0; k < d; ++k)
        for (Eigen::Index b = 0; b < d; ++b)
          s(i + k * d, a + b * d) = choi(i * d + a, k * d + b);
  return s;
}

Matrix kraus_to_superop(const std::vector<Matrix>& kraus) {
  Eigen::Index d = kraus.front().rows();
  Matrix s = Matrix::Zero(d * d, d * d);
  for (const auto& a : kraus) s += kron(a.conjugate(), a);
  return s;
}

Matrix liouvillian_superop(const Lindbladian& L) {
  if (L.n > 4) throw std::invalid_argument("liouvillian: n > 4 not supported");
  const Eigen::Index d = Eigen::Index{1} << L.n;
  const Matrix id = Matrix::Identity(d, d);
  Matrix h = L.hamiltonian.to_dense();
  const cd i{0.0, 1.0};
  // vec(H rho) = (I kron H) vec(rho); vec(rho H) = (H^T kron I) vec(rho).
  Matrix gen = -i * (kron(id, h) - kron(h.transpose(), id));
  for (const auto& jump : L.jumps) {
    Matrix lj = jump.to_dense();
    Matrix ldl = lj.adjoint() * lj;
    gen += kron(lj.conjugate(), lj) -
           0.5 * (kron(id, ldl) + kron(ldl.transpose(), id));
  }
  return gen;
}

ChannelRep exact_channel(const Lindbladian& L, double t) {
  if (t < 0) throw std::invalid_argument("exact_channel: negative time");
  Matrix gen = t * liouvillian_superop(L);
  Matrix commutator = gen * gen.adjoint() - gen.adjoint() * gen;
  Matrix expm;
  if (commutator.cwiseAbs().maxCoeff() < 1e-12) {
    // Normal generator: exponentiate on the eigenbasis.
    Eigen::ComplexEigenSolver<Matrix> es(gen);
    Vector evals = es.eigenvalues();
    Matrix v = es.eigenvectors();
    Vector exp_evals(evals.size());
    for (Eigen::Index k = 0; k < evals.size(); ++k)
      exp_evals(k) = std::exp(evals(k));
    expm = v * exp_evals.asDiagonal() * v.inverse();
  } else {
    expm = gen.exp();
  }
  return ChannelRep::from_superop(std::move(expm));
}

ChannelRep first_order_map(const Lindbladian& L, double delta) {
  const Eigen::Index d = Eigen::Index{1} << L.n;
  Matrix s = Matrix::Identity(d * d, d * d) + delta * liouvillian_superop(L);
  return ChannelRep::from_superop(std::move(s));
}

double trace_norm(const Matrix& m) {
  Matrix diff_h = 0.5 * (m + m.adjoint());
  if ((m - diff_h).cwiseAbs().maxCoeff() < 1e-13) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(diff_h);
    return es.eigenvalues().cwiseAbs().sum();
  }
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

double choi_distance(const ChannelRep& a, const ChannelRep& b) {
  if (a.dim() != b.dim())
    throw std::invalid_argument("choi_distance: dimension mismatch");
  return trace_norm(a.choi() - b.choi()) / static_cast<double>(a.dim());
}

double state_trace_distance(const Matrix& rho, const Matrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
    throw std::invalid_argument("state_trace_distance: dimension mismatch");
  return 0.5 * trace_norm(rho - sigma);
}

}  // namespace lindsim
