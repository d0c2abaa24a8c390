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

#include "lindsim/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace lindsim {

using nlohmann::json;

Lindbladian::Lindbladian(int n_, PauliSum h, std::vector<PauliSum> jumps_)
    : n(n_), hamiltonian(std::move(h)) {
  if (hamiltonian.n != n && !hamiltonian.empty())
    throw std::invalid_argument("Hamiltonian qubit count mismatch");
  hamiltonian.n = n;
  for (const auto& t : hamiltonian.terms) {
    if (t.phase == Phase::PlusI || t.phase == Phase::MinusI)
      throw std::invalid_argument(
          "Hamiltonian term " + axes_to_string(t.axes) +
          " has an imaginary phase; Hamiltonian terms must be Hermitian");
  }
  jumps.reserve(jumps_.size());
  int idx = 0;
  for (auto& j : jumps_) {
    ++idx;
    if (j.n != n && !j.empty())
      throw std::invalid_argument("jump operator qubit count mismatch");
    j.n = n;
    if (pauli_norm(j) == 0.0) {
      dropped_jumps.push_back("jump " + std::to_string(idx));
      continue;
    }
    jumps.push_back(std::move(j));
  }
}

DerivedParams derived_params(const Lindbladian& L) {
  if (L.hamiltonian.empty() && L.jumps.empty())
    throw std::invalid_argument("empty Lindbladian");
  DerivedParams p;
  p.q0 = static_cast<int>(L.hamiltonian.size());
  p.m = static_cast<int>(L.jumps.size());
  p.q = p.q0;
  p.lambda = pauli_norm(L.hamiltonian);
  p.c.reserve(L.jumps.size());
  for (const auto& j : L.jumps) {
    double cj = pauli_norm(j);
    p.c.push_back(cj);
    p.lambda += cj * cj;
    p.q = std::max(p.q, static_cast<int>(j.size()));
  }
  return p;
}

ChannelMixture mixture_distribution(const Lindbladian& L) {
  DerivedParams p = derived_params(L);
  if (p.lambda <= 0.0)
    throw std::invalid_argument("mixture undefined: lambda is zero");
  ChannelMixture mix;
  mix.q0 = p.q0;
  mix.m = p.m;
  mix.weights.reserve(p.q0 + p.m);
  for (const auto& t : L.hamiltonian.terms)
    mix.weights.push_back(t.weight / p.lambda);
  for (double cj : p.c) mix.weights.push_back(cj * cj / p.lambda);
  return mix;
}

namespace {

int line_of_offset(const std::string& text, std::size_t offset) {
  int line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

cd parse_coefficient(const json& v) {
  if (v.is_number()) return cd(v.get<double>(), 0.0);
  if (!v.is_string())
    throw ModelParseError("coefficient must be a number or an \"a+bi\" string");
  std::string s = v.get<std::string>();
  s.erase(std::remove_if(s.begin(), s.end(), ::isspace), s.end());
  if (s.empty()) throw ModelParseError("empty coefficient");

  // Accept "a", "bi", "a+bi", "a-bi" with optional leading signs.
  auto parse_part = [](const std::string& part) -> double {
    if (part.empty() || part == "+") return 1.0;
    if (part == "-") return -1.0;
    std::size_t used = 0;
    double value = std::stod(part, &used);
    if (used != part.size()) throw ModelParseError("bad coefficient literal");
    return value;
  };

  if (s.back() == 'i' || s.back() == 'I') {
    std::string body = s.substr(0, s.size() - 1);
    // Split a possible real part: find a +/- that is not the leading sign
    // and not part of an exponent.
    for (std::size_t k = body.size(); k-- > 1;) {
      if ((body[k] == '+' || body[k] == '-') &&
          body[k - 1] != 'e' && body[k - 1] != 'E') {
        return cd(parse_part(body.substr(0, k)),
                  parse_part(body.substr(k)));
      }
    }
    return cd(0.0, parse_part(body));
  }
  std::size_t used = 0;
  double value = std::stod(s, &used);
  if (used != s.size()) throw ModelParseError("bad coefficient literal");
  return cd(value, 0.0);
}

PauliSum parse_pauli_sum(const json& arr, int n, const std::string& what) {
  if (!arr.is_array())
    throw ModelParseError(what + " must be an array of terms");
  std::vector<PauliTerm> terms;
  terms.reserve(arr.size());
  for (const auto& item : arr) {
    if (!item.contains("pauli"))
      throw ModelParseError(what + ": term missing \"pauli\"");
    if (!item.contains("coeff"))
      throw ModelParseError(what + ": term missing \"coeff\"");
    auto axes = parse_axes(item["pauli"].get<std::string>());
    if (static_cast<int>(axes.size()) != n)
      throw ModelParseError(what + ": Pauli string \"" +
                            item["pauli"].get<std::string>() + "\" has " +
                            std::to_string(axes.size()) +
                            " letters but the model declares n=" +
                            std::to_string(n));
    auto [weight, phase] = normalize_coefficient(parse_coefficient(item["coeff"]));
    terms.push_back({std::move(axes), phase, weight});
  }
  return PauliSum(n, std::move(terms));
}

std::string coefficient_to_string(double weight, Phase phase) {
  std::ostringstream os;
  os.precision(17);
  switch (phase) {
    case Phase::Plus:
      os << weight;
      break;
    case Phase::Minus:
      os << -weight;
      break;
    case Phase::PlusI:
      os << weight << "i";
      break;
    case Phase::MinusI:
      os << -weight << "i";
      break;
  }
  return os.str();
}

json pauli_sum_to_json(const PauliSum& s) {
  json arr = json::array();
  for (const auto& t : s.terms) {
    json term;
    term["pauli"] = axes_to_string(t.axes);
    if (t.phase == Phase::Plus) {
      term["coeff"] = t.weight;
    } else {
      term["coeff"] = coefficient_to_string(t.weight, t.phase);
    }
    arr.push_back(term);
  }
  return arr;
}

}  // namespace

Lindbladian parse_model(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ModelParseError(
        std::string("syntax error: ") + e.what(),
        line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0));
  }
  if (!doc.contains("n")) throw ModelParseError("missing qubit count \"n\"");
  int n = doc["n"].get<int>();
  if (n <= 0) throw ModelParseError("qubit count must be positive");

  PauliSum h(n, {});
  if (doc.contains("hamiltonian"))
    h = parse_pauli_sum(doc["hamiltonian"], n, "hamiltonian");

  std::vector<PauliSum> jumps;
  if (doc.contains("jumps")) {
    if (!doc["jumps"].is_array())
      throw ModelParseError("\"jumps\" must be an array of term arrays");
    int idx = 0;
    for (const auto& j : doc["jumps"]) {
      jumps.push_back(parse_pauli_sum(j, n, "jump " + std::to_string(idx)));
      ++idx;
    }
  }

  Lindbladian model(n, std::move(h), std::move(jumps));

  // Declared q is validated against the computed value, never trusted.
  if (doc.contains("q")) {
    DerivedParams p = derived_params(model);
    int declared = doc["q"].get<int>();
    if (declared != p.q)
      throw ModelParseError("declared q=" + std::to_string(declared) +
                            " does not match computed q=" +
                            std::to_string(p.q));
  }
  return model;
}

std::string serialize_model(const Lindbladian& L) {
  json doc;
  doc["n"] = L.n;
  doc["hamiltonian"] = pauli_sum_to_json(L.hamiltonian);
  json jumps = json::array();
  for (const auto& j : L.jumps) jumps.push_back(pauli_sum_to_json(j));
  doc["jumps"] = jumps;
  return doc.dump(2) + "\n";
}

Lindbladian scenario_depolarizing(int n, std::optional<PauliSum> hamiltonian) {
  if (n < 1 || n > 2)
    throw std::invalid_argument(
        "depolarizing scenario supports n in {1, 2} at desk scale");
  const double weight = std::pow(2.0, -n);
  std::vector<PauliSum> jumps;
  const std::size_t count = std::size_t{1} << (2 * n);
  jumps.reserve(count);
  for (std::size_t code = 0; code < count; ++code) {
    std::vector<Axis> axes(n);
    std::size_t c = code;
    for (int k = n - 1; k >= 0; --k) {
      axes[k] = static_cast<Axis>(c & 3);
      c >>= 2;
    }
    jumps.push_back(PauliSum(n, {{std::move(axes), Phase::Plus, weight}}));
  }
  PauliSum h = hamiltonian.value_or(PauliSum(n, {}));
  return Lindbladian(n, std::move(h), std::move(jumps));
}

Lindbladian scenario_xy(int n, double J, Topology topology) {
  if (n < 2) throw std::invalid_argument("XY model needs n >= 2");
  std::vector<std::pair<int, int>> edges;
  if (topology == Topology::FullyConnected) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  } else {
    for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  }

  auto [weight, phase] = normalize_coefficient(cd(-J, 0.0));
  std::vector<PauliTerm> h_terms;
  h_terms.reserve(2 * edges.size());
  for (auto [i, j] : edges) {
    for (Axis a : {Axis::X, Axis::Y}) {
      std::vector<Axis> axes(n, Axis::I);
      axes[i] = a;
      axes[j] = a;
      h_terms.push_back({std::move(axes), phase, weight});
    }
  }

  std::vector<PauliSum> jumps;
  jumps.reserve(n);
  for (int i = 0; i < n; ++i) {
    std::vector<Axis> axes(n, Axis::I);
    axes[i] = Axis::Z;
    jumps.push_back(PauliSum(n, {{std::move(axes), Phase::Plus, 1.0}}));
  }
  return Lindbladian(n, PauliSum(n, std::move(h_terms)), std::move(jumps));
}

Lindbladian scenario_collective_lowering(
    int n, const std::map<std::vector<int>, double>& rates) {
  std::vector<PauliSum> jumps;
  for (const auto& [subset, gamma] : rates) {
    if (subset.empty())
      throw std::invalid_argument("collective lowering: empty subset");
    if (gamma < 0)
      throw std::invalid_argument("collective lowering: negative rate");
    for (int q : subset)
      if (q < 0 || q >= n)
        throw std::invalid_argument("collective lowering: qubit out of range");

    // Expand sqrt(gamma) prod_{i in S} (X_i + iY_i)/2 into 2^|S| terms.
    const double base = std::sqrt(gamma) * std::pow(0.5, subset.size());
    std::vector<PauliTerm> terms;
    const std::size_t combos = std::size_t{1} << subset.size();
    terms.reserve(combos);
    for (std::size_t bits = 0; bits < combos; ++bits) {
      std::vector<Axis> axes(n, Axis::I);
      int y_count = 0;
      for (std::size_t k = 0; k < subset.size(); ++k) {
        bool y = (bits >> k) & 1;
        axes[subset[k]] = y ? Axis::Y : Axis::X;
        y_count += y;
      }
      Phase phase = static_cast<Phase>(y_count % 4);
      terms.push_back({std::move(axes), phase, base});
    }
    jumps.push_back(PauliSum(n, std::move(terms)));
  }
  return Lindbladian(n, PauliSum(n, {}), std::move(jumps));
}

}  // namespace lindsim
