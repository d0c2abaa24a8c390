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

#include <optional>
#include <vector>

#include "lindsim/model.hpp"
#include "lindsim/pauli.hpp"

namespace lindsim {

// Vectorization is column-stacking throughout: vec(rho)[i + j*d] = rho(i,j),
// so vec(A rho B) = (B^T kron A) vec(rho).
Vector vectorize(const Matrix& rho);
Matrix unvectorize(const Vector& v, Eigen::Index d);

Matrix kron(const Matrix& a, const Matrix& b);

/**
 * A quantum channel in interchangeable representations.
 *
 * All forms refer to the same map on d x d density matrices. The Choi
 * matrix is unnormalized, J = sum_{ab} Phi(|a><b|) (x) |a><b|, with the
 * output system as the first tensor factor.
 */
class ChannelRep {
 public:
  static ChannelRep from_superop(Matrix superop);
  static ChannelRep from_kraus(std::vector<Matrix> kraus);
  static ChannelRep from_choi(Matrix choi, Eigen::Index d);
  static ChannelRep identity(Eigen::Index d);

  Eigen::Index dim() const { return d_; }

  const Matrix& superop() const;
  const Matrix& choi() const;
  /// Kraus decomposition from the Choi eigensystem (threshold on eigenvalues).
  const std::vector<Matrix>& kraus(double threshold = 1e-10) const;

  Matrix apply(const Matrix& rho) const;

  /// max(0, -min eigenvalue of Choi): complete-positivity defect.
  double cp_defect() const;
  /// || tr_out(choi) - I ||_max: trace-preservation defect.
  double tp_defect() const;
  bool is_cptp(double tol = 1e-10) const;

 private:
  ChannelRep() = default;
  Eigen::Index d_ = 0;
  mutable std::optional<Matrix> superop_;
  mutable std::optional<Matrix> choi_;
  mutable std::optional<std::vector<Matrix>> kraus_;
};

Matrix superop_to_choi(const Matrix& superop, Eigen::Index d);
Matrix choi_to_superop(const Matrix& choi, Eigen::Index d);
Matrix kraus_to_superop(const std::vector<Matrix>& kraus);

/// Vectorized Lindblad generator of the model (column-stacking).
Matrix liouvillian_superop(const Lindbladian& L);

/// exp(t * liouvillian) as a channel. Uses an eigendecomposition when the
/// Liouvillian is normal and Pade scaling-and-squaring otherwise.
ChannelRep exact_channel(const Lindbladian& L, double t);

/// The (non-CPTP) first-order map I + delta * liouvillian.
ChannelRep first_order_map(const Lindbladian& L, double delta);

/// (1/d) * trace norm of the Choi difference. For Hermiticity-preserving
/// differences this lower-bounds the diamond norm and d * it upper-bounds it.
double choi_distance(const ChannelRep& a, const ChannelRep& b);

/// (1/2) ||rho - sigma||_1 for Hermitian inputs.
double state_trace_distance(const Matrix& rho, const Matrix& sigma);

/// Trace norm (sum of singular values; |eigenvalues| for Hermitian input).
double trace_norm(const Matrix& m);

}  // namespace lindsim
