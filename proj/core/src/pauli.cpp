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

#include "lindsim/pauli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace lindsim {

cd phase_value(Phase p) {
  switch (p) {
    case Phase::Plus:
      return {1.0, 0.0};
    case Phase::PlusI:
      return {0.0, 1.0};
    case Phase::Minus:
      return {-1.0, 0.0};
    case Phase::MinusI:
      return {0.0, -1.0};
  }
  return {1.0, 0.0};
}

Phase phase_multiply(Phase a, Phase b) {
  return static_cast<Phase>((static_cast<int>(a) + static_cast<int>(b)) % 4);
}

Phase phase_conjugate(Phase p) {
  return static_cast<Phase>((4 - static_cast<int>(p)) % 4);
}

PauliTerm PauliTerm::adjoint() const {
  // Pauli strings are Hermitian; only the phase conjugates.
  return {axes, phase_conjugate(phase), weight};
}

bool operator<(const PauliTerm& a, const PauliTerm& b) {
  if (a.axes != b.axes) return a.axes < b.axes;
  return static_cast<int>(a.phase) < static_cast<int>(b.phase);
}

bool operator==(const PauliTerm& a, const PauliTerm& b) {
  return a.axes == b.axes && a.phase == b.phase && a.weight == b.weight;
}

std::vector<Axis> parse_axes(const std::string& letters) {
  std::vector<Axis> axes;
  axes.reserve(letters.size());
  for (char c : letters) {
    switch (c) {
      case 'I':
      case 'i':
        axes.push_back(Axis::I);
        break;
      case 'X':
      case 'x':
        axes.push_back(Axis::X);
        break;
      case 'Y':
      case 'y':
        axes.push_back(Axis::Y);
        break;
      case 'Z':
      case 'z':
        axes.push_back(Axis::Z);
        break;
      default:
        throw std::invalid_argument(std::string("invalid Pauli letter '") + c +
                                    "' in \"" + letters + "\"");
    }
  }
  return axes;
}

std::string axes_to_string(std::span<const Axis> axes) {
  static const char kLetters[] = {'I', 'X', 'Y', 'Z'};
  std::string s;
  s.reserve(axes.size());
  for (Axis a : axes) s.push_back(kLetters[static_cast<int>(a)]);
  return s;
}

std::pair<double, Phase> normalize_coefficient(cd coeff, double tol) {
  double re = coeff.real(), im = coeff.imag();
  if (std::abs(re) > tol && std::abs(im) > tol) {
    throw std::invalid_argument(
        "coefficient must be real or purely imaginary; got (" +
        std::to_string(re) + ", " + std::to_string(im) + ")");
  }
  if (std::abs(im) <= tol) {
    return {std::abs(re), re >= 0 ? Phase::Plus : Phase::Minus};
  }
  return {std::abs(im), im >= 0 ? Phase::PlusI : Phase::MinusI};
}

namespace {

Eigen::Matrix2cd single_qubit_matrix(Axis a) {
  Eigen::Matrix2cd m;
  const cd i{0.0, 1.0};
  switch (a) {
    case Axis::I:
      m << 1, 0, 0, 1;
      break;
    case Axis::X:
      m << 0, 1, 1, 0;
      break;
    case Axis::Y:
      m << 0, -i, i, 0;
      break;
    case Axis::Z:
      m << 1, 0, 0, -1;
      break;
  }
  return m;
}

}  // namespace

Matrix to_dense(const PauliTerm& term) {
  // axes[0] is the leftmost tensor factor (most significant bit).
  Matrix m = Matrix::Identity(1, 1);
  for (Axis a : term.axes) {
    Eigen::Matrix2cd s = single_qubit_matrix(a);
    Matrix next(m.rows() * 2, m.cols() * 2);
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c)
        next.block(r * 2, c * 2, 2, 2) = m(r, c) * s;
    m = std::move(next);
  }
  return term.weight * phase_value(term.phase) * m;
}

void apply_pauli_to_statevector(const PauliTerm& term, std::span<const cd> in,
                                std::span<cd> out, int n_total,
                                std::span<const int> targets) {
  if (targets.size() != term.axes.size())
    throw std::invalid_argument("target count does not match axes length");
  const std::size_t dim = std::size_t{1} << n_total;
  if (in.size() != dim || out.size() != dim)
    throw std::invalid_argument("statevector dimension mismatch");

  uint64_t flip_mask = 0;   // X and Y targets
  uint64_t z_mask = 0;      // Z targets
  uint64_t y_mask = 0;      // Y targets
  for (std::size_t k = 0; k < targets.size(); ++k) {
    int q = targets[k];
    if (q < 0 || q >= n_total) throw std::out_of_range("target qubit index");
    uint64_t bit = uint64_t{1} << (n_total - 1 - q);
    switch (term.axes[k]) {
      case Axis::I:
        break;
      case Axis::X:
        flip_mask |= bit;
        break;
      case Axis::Y:
        flip_mask |= bit;
        y_mask |= bit;
        break;
      case Axis::Z:
        z_mask |= bit;
        break;
    }
  }

  const cd base = term.weight * phase_value(term.phase);
  const int n_y = std::popcount(y_mask);
  // Each Y contributes i * (-1)^bit; collect the i's up front.
  cd y_global{1.0, 0.0};
  for (int k = 0; k < n_y; ++k) y_global *= cd{0.0, 1.0};

  for (uint64_t idx = 0; idx < dim; ++idx) {
    int sign_bits =
        std::popcount(idx & z_mask) + std::popcount(idx & y_mask);
    cd factor = base * y_global * ((sign_bits & 1) ? -1.0 : 1.0);
    out[idx ^ flip_mask] = factor * in[idx];
  }
}

Vector apply_pauli_to_statevector(const PauliTerm& term, const Vector& psi) {
  int n = static_cast<int>(term.axes.size());
  Vector out(psi.size());
  std::vector<int> targets(n);
  for (int k = 0; k < n; ++k) targets[k] = k;
  apply_pauli_to_statevector(
      term, std::span<const cd>(psi.data(), psi.size()),
      std::span<cd>(out.data(), out.size()), n, targets);
  return out;
}

PauliSum::PauliSum(int n_, std::vector<PauliTerm> terms_)
    : n(n_), terms(std::move(terms_)) {
  for (const auto& t : terms) {
    if (static_cast<int>(t.axes.size()) != n)
      throw std::invalid_argument("term \"" + axes_to_string(t.axes) +
                                  "\" does not match qubit count " +
                                  std::to_string(n));
    if (t.weight < 0) throw std::invalid_argument("negative term weight");
  }
  canonicalize();
}

void PauliSum::canonicalize() {
  std::sort(terms.begin(), terms.end(),
            [](const PauliTerm& a, const PauliTerm& b) { return a < b; });
  std::vector<PauliTerm> merged;
  for (const auto& t : terms) {
    if (t.weight == 0.0) continue;
    if (!merged.empty() && merged.back().axes == t.axes &&
        merged.back().phase == t.phase) {
      merged.back().weight += t.weight;
    } else {
      merged.push_back(t);
    }
  }
  terms = std::move(merged);
}

Matrix PauliSum::to_dense() const {
  const Eigen::Index dim = Eigen::Index{1} << n;
  Matrix m = Matrix::Zero(dim, dim);
  for (const auto& t : terms) m += lindsim::to_dense(t);
  return m;
}

PauliSum PauliSum::adjoint() const {
  PauliSum out;
  out.n = n;
  out.terms.reserve(terms.size());
  for (const auto& t : terms) out.terms.push_back(t.adjoint());
  out.canonicalize();
  return out;
}

double pauli_norm(const PauliSum& s) {
  double total = 0.0;
  for (const auto& t : s.terms) total += t.weight;
  return total;
}

}  // namespace lindsim
