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

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace lindsim {

using cd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class Axis : uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

/// Phase stored as a power of i: phase = i^value.
enum class Phase : uint8_t { Plus = 0, PlusI = 1, Minus = 2, MinusI = 3 };

cd phase_value(Phase p);
Phase phase_multiply(Phase a, Phase b);
Phase phase_conjugate(Phase p);

/**
 * A weighted, phased Pauli string.
 *
 * The dense realization is weight * i^phase * (sigma_{axes[0]} x ... x
 * sigma_{axes[n-1]}), with qubit 0 the leftmost (most significant) tensor
 * factor. Weights are nonnegative by construction; signs and imaginary
 * units live in the phase, so the operator norm of a term equals its
 * weight.
 */
struct PauliTerm {
  std::vector<Axis> axes;
  Phase phase = Phase::Plus;
  double weight = 1.0;

  std::size_t num_qubits() const { return axes.size(); }

  /// The unit-weight unitary part (phase * Pauli string).
  PauliTerm unit() const { return {axes, phase, 1.0}; }

  PauliTerm adjoint() const;

  /// Lexicographic on axes, then phase; used for canonical ordering.
  friend bool operator<(const PauliTerm& a, const PauliTerm& b);
  friend bool operator==(const PauliTerm& a, const PauliTerm& b);
};

/// Parse a letter string such as "IXZ" into axes.
std::vector<Axis> parse_axes(const std::string& letters);
std::string axes_to_string(std::span<const Axis> axes);

/**
 * Normalize a complex coefficient into (weight, phase).
 *
 * Only coefficients on the real or imaginary axis are representable;
 * anything else is rejected. Negative and imaginary signs fold into the
 * phase so the weight stays nonnegative.
 */
std::pair<double, Phase> normalize_coefficient(cd coeff, double tol = 1e-12);

/// Dense 2^n x 2^n realization of a term (n = axes length).
Matrix to_dense(const PauliTerm& term);

/**
 * Matrix-free action of a term on a statevector over n_total qubits.
 *
 * targets[k] names the qubit acted on by axes[k]; qubit q maps to bit
 * (n_total-1-q) of the basis index.
 */
void apply_pauli_to_statevector(const PauliTerm& term, std::span<const cd> in,
                                std::span<cd> out, int n_total,
                                std::span<const int> targets);

/// Convenience overload acting on all qubits in order.
Vector apply_pauli_to_statevector(const PauliTerm& term, const Vector& psi);

/** A sum of weighted phased Pauli strings over a fixed qubit count. */
struct PauliSum {
  int n = 0;
  std::vector<PauliTerm> terms;

  PauliSum() = default;
  PauliSum(int n_, std::vector<PauliTerm> terms_);

  bool empty() const { return terms.empty(); }
  std::size_t size() const { return terms.size(); }

  /// Sorts terms canonically and merges equal (axes, phase) pairs.
  void canonicalize();

  Matrix to_dense() const;
  PauliSum adjoint() const;
};

/// Sum of weights; an upper bound on the spectral norm of the realization.
double pauli_norm(const PauliSum& s);

}  // namespace lindsim
