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

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "lindsim/channel.hpp"
#include "lindsim/compressed.hpp"
#include "lindsim/cost.hpp"
#include "lindsim/gadgets.hpp"
#include "lindsim/model.hpp"
#include "lindsim/trajectory.hpp"
#include "lindsim/verify.hpp"

namespace {

using nlohmann::json;
using namespace lindsim;

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitCap = 3;
constexpr int kExitVerify = 4;
constexpr int kExitUsage = 64;

struct CliError : std::runtime_error {
  CliError(const std::string& what, int code_) : std::runtime_error(what),
                                                 code(code_) {}
  int code;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError("cannot open " + path, kExitParse);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw CliError("cannot write " + path, kExitParse);
  out << text;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(row);
  }
  return rows;
}

struct ScenarioSpec {
  std::string name;
  int n = 1;
  double J = -1.0;
  std::string topology = "full";
  std::vector<std::string> gammas;
  bool with_hamiltonian = false;
};

Lindbladian make_scenario(const ScenarioSpec& spec) {
  if (spec.name == "depolarizing") {
    std::optional<PauliSum> h;
    if (spec.with_hamiltonian) {
      std::vector<Axis> axes(spec.n, Axis::I);
      axes[0] = Axis::Z;
      h = PauliSum(spec.n, {{axes, Phase::Plus, 0.5}});
    }
    return scenario_depolarizing(spec.n, h);
  }
  if (spec.name == "xy") {
    Topology topo = spec.topology == "chain" ? Topology::Chain
                                             : Topology::FullyConnected;
    return scenario_xy(spec.n, spec.J, topo);
  }
  if (spec.name == "collective") {
    std::map<std::vector<int>, double> rates;
    for (const auto& entry : spec.gammas) {
      auto eq = entry.find('=');
      if (eq == std::string::npos)
        throw CliError("bad --gamma entry \"" + entry +
                       "\"; expected like 0,1=0.5", kExitParse);
      std::vector<int> subset;
      std::stringstream ss(entry.substr(0, eq));
      std::string tok;
      while (std::getline(ss, tok, ',')) subset.push_back(std::stoi(tok));
      rates[subset] = std::stod(entry.substr(eq + 1));
    }
    if (rates.empty()) rates[{0}] = 1.0;
    return scenario_collective_lowering(spec.n, rates);
  }
  throw CliError("unknown scenario \"" + spec.name + "\"", kExitParse);
}

Matrix initial_state(const std::string& kind, int n) {
  const Eigen::Index d = Eigen::Index{1} << n;
  if (kind == "zero") {
    Matrix rho = Matrix::Zero(d, d);
    rho(0, 0) = 1.0;
    return rho;
  }
  if (kind == "plus") {
    Vector psi = Vector::Constant(d, 1.0 / std::sqrt(static_cast<double>(d)));
    return psi * psi.adjoint();
  }
  if (kind == "mixed")
    return Matrix::Identity(d, d) / static_cast<double>(d);
  throw CliError("unknown initial state \"" + kind + "\"", kExitParse);
}

int exit_code_for(const std::exception& e) {
  std::string what = e.what();
  if (what.find("cap") != std::string::npos ||
      what.find("budget") != std::string::npos ||
      what.find("too large") != std::string::npos)
    return kExitCap;
  return kExitParse;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lindbladian simulation workbench"};
  app.require_subcommand(1);

  // --- evolve ---
  auto* evolve = app.add_subcommand("evolve", "run one evolution");
  std::string model_path, scenario_name, backend = "exact";
  std::string out_path, format = "json", initial = "zero";
  ScenarioSpec scenario;
  double t = 1.0, eps = 0.1;
  std::uint64_t seed = 1;
  std::uint64_t n_traj = 10000;
  int n_samples = 100, h_override = 0;
  evolve->add_option("--model", model_path, "model file path");
  evolve->add_option("--scenario", scenario_name,
                     "depolarizing | xy | collective");
  evolve->add_option("--n", scenario.n, "scenario qubit count");
  evolve->add_option("--J", scenario.J, "XY interaction strength");
  evolve->add_option("--topology", scenario.topology, "full | chain");
  evolve->add_option("--gamma", scenario.gammas,
                     "collective rate entries like 0,1=0.5");
  evolve->add_flag("--with-hamiltonian", scenario.with_hamiltonian,
                   "attach 0.5 Z_0 to the depolarizing scenario");
  evolve->add_option("--t", t, "evolution time");
  evolve->add_option("--eps", eps, "target precision");
  evolve->add_option("--backend", backend,
                     "exact | channel | montecarlo | circuit-alg1 | "
                     "circuit-alg2");
  evolve->add_option("--seed", seed, "RNG seed");
  evolve->add_option("--n-traj", n_traj, "Monte Carlo trajectories");
  evolve->add_option("--n-samples", n_samples, "circuit-alg1 samples");
  evolve->add_option("--h", h_override, "cutoff override for circuit-alg2");
  evolve->add_option("--initial", initial, "zero | plus | mixed");
  evolve->add_option("--out", out_path, "output path (default stdout)");
  evolve->add_option("--format", format, "json");

  // --- verify ---
  auto* verify = app.add_subcommand("verify", "run an invariant suite");
  std::string suite;
  verify->add_option("suite", suite, "lemma-channel | gadgets | oaa | "
                                     "structure | cutoff | costs")
      ->required();

  // --- cost ---
  auto* cost = app.add_subcommand("cost", "emit gate-count sweeps as CSV");
  std::string sweep_spec;
  CostParams base;
  cost->add_option("--sweep", sweep_spec,
                   "e.g. m=2,4,8,16 or n=2,3,4,5 (variable: n,m,q,t,eps)");
  cost->add_option("--n", base.n, "qubit count");
  cost->add_option("--q", base.q, "max Pauli terms per operator");
  cost->add_option("--q0", base.q0, "Hamiltonian term count");
  cost->add_option("--m", base.m, "jump count");
  cost->add_option("--t", base.t, "time");
  cost->add_option("--eps", base.eps, "precision");
  cost->add_option("--lambda", base.lambda, "Pauli norm of the generator");
  std::string cost_out;
  cost->add_option("--out", cost_out, "output path (default stdout)");

  // --- scenario ---
  auto* scen = app.add_subcommand("scenario", "emit a model file");
  std::string scen_name, scen_out;
  ScenarioSpec scen_spec;
  scen->add_option("name", scen_name, "depolarizing | xy | collective")
      ->required();
  scen->add_option("--n", scen_spec.n, "qubit count");
  scen->add_option("--J", scen_spec.J, "XY interaction strength");
  scen->add_option("--topology", scen_spec.topology, "full | chain");
  scen->add_option("--gamma", scen_spec.gammas, "collective rates");
  scen->add_flag("--with-hamiltonian", scen_spec.with_hamiltonian,
                 "attach 0.5 Z_0 to the depolarizing scenario");
  scen->add_option("--out", scen_out, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*verify) {
      bool known = false;
      for (const auto& name : verify_suite_names()) known |= name == suite;
      if (!known) {
        std::cerr << "error: unknown suite \"" << suite
                  << "\"; choose one of:";
        for (const auto& name : verify_suite_names())
          std::cerr << " " << name;
        std::cerr << "\n";
        return kExitUsage;
      }
      auto results = run_verify_suite(suite);
      bool all_pass = true;
      for (const auto& result : results) {
        std::cout << (result.pass ? "PASS" : "FAIL") << "  " << result.name
                  << "  (" << result.detail << ")\n";
        all_pass = all_pass && result.pass;
      }
      return all_pass ? kExitOk : kExitVerify;
    }

    if (*cost) {
      std::vector<CostParams> points;
      if (sweep_spec.empty()) {
        points.push_back(base);
      } else {
        auto eq = sweep_spec.find('=');
        if (eq == std::string::npos)
          throw CliError("bad --sweep \"" + sweep_spec + "\"", kExitParse);
        std::string var = sweep_spec.substr(0, eq);
        std::stringstream ss(sweep_spec.substr(eq + 1));
        std::string tok;
        while (std::getline(ss, tok, ',')) {
          CostParams point = base;
          double value = std::stod(tok);
          if (var == "n")
            point.n = static_cast<int>(value);
          else if (var == "m")
            point.m = static_cast<int>(value);
          else if (var == "q")
            point.q = static_cast<int>(value);
          else if (var == "t")
            point.t = value;
          else if (var == "eps")
            point.eps = value;
          else
            throw CliError("unknown sweep variable \"" + var + "\"",
                           kExitParse);
          points.push_back(point);
        }
      }
      std::ostringstream os;
      os << cost_csv_header() << "\n";
      for (const auto& point : points) {
        double cw16 = count_cw16_formula(point);
        os << cost_csv_row(count_alg1(point), cw16) << "\n";
        os << cost_csv_row(count_alg2(point), cw16) << "\n";
      }
      write_output(cost_out, os.str());
      return kExitOk;
    }

    if (*scen) {
      scen_spec.name = scen_name;
      Lindbladian model = make_scenario(scen_spec);
      write_output(scen_out, serialize_model(model));
      return kExitOk;
    }

    // evolve
    Lindbladian model = [&] {
      if (!model_path.empty()) return parse_model(read_file(model_path));
      if (!scenario_name.empty()) {
        scenario.name = scenario_name;
        return make_scenario(scenario);
      }
      throw CliError("evolve needs --model or --scenario", kExitParse);
    }();

    auto t0 = std::chrono::steady_clock::now();
    Matrix rho0 = initial_state(initial, model.n);
    DerivedParams params = derived_params(model);

    json report;
    report["backend"] = backend;
    report["n"] = model.n;
    report["t"] = t;
    report["eps"] = eps;
    report["seed"] = seed;
    report["lambda"] = params.lambda;
    report["initial"] = matrix_to_json(rho0);

    Matrix rho_final;
    if (backend == "exact") {
      rho_final = exact_channel(model, t).apply(rho0);
    } else if (backend == "channel") {
      auto result = evolve_channel_level(model, t, eps, rho0);
      rho_final = result.rho;
      report["tau"] = result.seg.tau;
      report["r"] = result.seg.r;
      report["delta"] = result.seg.delta;
      report["trace_defect"] = result.trace_defect;
    } else if (backend == "montecarlo") {
      Vector psi0 = Vector::Zero(rho0.rows());
      if (initial == "plus")
        psi0 = Vector::Constant(rho0.rows(),
                                1.0 / std::sqrt(double(rho0.rows())));
      else if (initial == "zero")
        psi0(0) = 1.0;
      else
        throw CliError("montecarlo backend needs a pure initial state",
                       kExitParse);
      auto result = evolve_monte_carlo(model, t, eps, psi0, n_traj, seed);
      rho_final = result.rho;
      report["tau"] = result.seg.tau;
      report["r"] = result.seg.r;
      report["n_traj"] = result.n_traj;
      report["stderr_max"] = result.stderr_abs.cwiseAbs().maxCoeff();
    } else if (backend == "circuit-alg1") {
      auto result = run_algorithm1(model, t, eps, rho0, n_samples, seed);
      rho_final = result.rho;
      report["tau"] = result.seg.tau;
      report["r"] = result.seg.r;
      report["n_samples"] = result.n_samples;
      report["gadget_form"] =
          result.form == GadgetForm::Full ? "full" : "dilated";
      report["stderr_max"] = result.stderr_abs.cwiseAbs().maxCoeff();
    } else if (backend == "circuit-alg2") {
      auto result = run_algorithm2(model, t, eps, rho0, h_override);
      rho_final = result.rho;
      report["tau"] = result.seg.tau;
      report["r"] = result.seg.r;
      report["h"] = result.h;
      report["eps_enc"] = result.eps_enc;
    } else {
      throw CliError("unknown backend \"" + backend + "\"", kExitParse);
    }

    report["final"] = matrix_to_json(rho_final);
    report["trace"] = rho_final.trace().real();
    report["trace_defect_abs"] = std::abs(rho_final.trace().real() - 1.0);
    if (model.n <= 4) {
      Matrix exact = exact_channel(model, t).apply(rho0);
      report["distance_to_exact"] = state_trace_distance(rho_final, exact);
    }
    if (!model.dropped_jumps.empty()) report["dropped"] = model.dropped_jumps;

    auto t1 = std::chrono::steady_clock::now();
    // Timing goes to stderr so reports stay byte-identical across runs.
    std::cerr << "wall_time_ms "
              << std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0)
                     .count()
              << "\n";
    (void)format;
    write_output(out_path, report.dump(2) + "\n");
    return kExitOk;
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code;
  } catch (const ModelParseError& e) {
    std::cerr << "error: " << e.what();
    if (e.line >= 0) std::cerr << " (line " << e.line << ")";
    std::cerr << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}
