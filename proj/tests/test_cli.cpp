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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <string>

#include <json.hpp>

namespace {

struct RunResult {
  int exit_code;
  std::string stdout_text;
};

RunResult run_cli(const std::string& args) {
  std::string command = std::string(LINDSIM_CLI_PATH) + " " + args +
                        " 2>/dev/null";
  std::array<char, 4096> buffer{};
  std::string output;
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::size_t got;
  while ((got = fread(buffer.data(), 1, buffer.size(), pipe)) > 0)
    output.append(buffer.data(), got);
  int status = pclose(pipe);
  return {WEXITSTATUS(status), output};
}

}  // namespace

TEST_CASE("exact backend at t = 0 reports zero distance") {
  auto result = run_cli(
      "evolve --scenario depolarizing --n 1 --backend exact --t 0");
  CHECK(result.exit_code == 0);
  auto report = nlohmann::json::parse(result.stdout_text);
  CHECK(report["distance_to_exact"].get<double>() == 0.0);
}

TEST_CASE("channel backend reproduces the depolarizing closed form") {
  auto result = run_cli(
      "evolve --scenario depolarizing --n 1 --backend channel "
      "--t 0.6931471805599453 --eps 0.1");
  CHECK(result.exit_code == 0);
  auto report = nlohmann::json::parse(result.stdout_text);
  auto final_state = report["final"];
  double p00 = final_state[0][0][0].get<double>();
  double p11 = final_state[1][1][0].get<double>();
  CHECK(std::abs(p00 - 0.75) <= 0.1);
  CHECK(std::abs(p11 - 0.25) <= 0.1);
  CHECK(report["distance_to_exact"].get<double>() <= 0.1);
}

TEST_CASE("monte carlo reports are byte-identical under a fixed seed") {
  std::string args =
      "evolve --scenario collective --n 1 --gamma 0=1 --backend montecarlo "
      "--t 0.5 --eps 0.1 --seed 7 --n-traj 2000";
  auto first = run_cli(args);
  auto second = run_cli(args);
  CHECK(first.exit_code == 0);
  CHECK(first.stdout_text == second.stdout_text);
}

TEST_CASE("exit codes distinguish failure classes") {
  // Parse failure: malformed model document.
  {
    std::ofstream bad("/tmp/lindsim_bad_model.json");
    bad << "{ not json";
  }
  CHECK(run_cli("evolve --model /tmp/lindsim_bad_model.json").exit_code == 2);

  // Missing ingestion path.
  CHECK(run_cli("evolve --backend exact").exit_code == 2);

  // Cap violation: a precision that forces far too many slots.
  CHECK(run_cli("evolve --scenario depolarizing --n 1 --backend circuit-alg1 "
                "--t 4 --eps 0.0001 --n-samples 1")
            .exit_code == 3);

  // Unknown suite is a usage error.
  CHECK(run_cli("verify no-such-suite").exit_code == 64);

  // Unknown flag is a usage error.
  CHECK(run_cli("evolve --frobnicate 1").exit_code == 64);
}

TEST_CASE("verify suite passes and prints a table") {
  auto result = run_cli("verify costs");
  CHECK(result.exit_code == 0);
  CHECK(result.stdout_text.find("PASS") != std::string::npos);
  CHECK(result.stdout_text.find("FAIL") == std::string::npos);
}

TEST_CASE("cost sweep emits plot-ready CSV") {
  auto result = run_cli("cost --sweep m=2,4,8,16 --n 2 --q 4 --q0 2 --t 2 "
                        "--eps 0.1 --lambda 2");
  CHECK(result.exit_code == 0);
  std::istringstream lines(result.stdout_text);
  std::string header;
  std::getline(lines, header);
  CHECK(header.find("count_total") != std::string::npos);
  // alg1 rows are m-invariant: extract the totals.
  std::vector<std::string> alg1_totals;
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind("alg1,", 0) != 0) continue;
    std::stringstream ss(line);
    std::string field;
    for (int k = 0; k <= 10; ++k) std::getline(ss, field, ',');
    alg1_totals.push_back(field);
  }
  REQUIRE(alg1_totals.size() == 4);
  for (const auto& total : alg1_totals) CHECK(total == alg1_totals[0]);
}

TEST_CASE("scenario emission round-trips through evolve") {
  auto emitted = run_cli("scenario xy --n 2 --J -1 --out /tmp/lindsim_xy.json");
  CHECK(emitted.exit_code == 0);
  auto result = run_cli(
      "evolve --model /tmp/lindsim_xy.json --backend exact --t 0.2");
  CHECK(result.exit_code == 0);
  auto report = nlohmann::json::parse(result.stdout_text);
  CHECK(report["lambda"].get<double>() == doctest::Approx(4.0));
}

TEST_CASE("circuit backends agree with the oracle on small runs") {
  auto result = run_cli(
      "evolve --scenario collective --n 1 --gamma 0=1 --backend circuit-alg2 "
      "--t 0.3 --eps 0.25");
  CHECK(result.exit_code == 0);
  auto report = nlohmann::json::parse(result.stdout_text);
  CHECK(report["distance_to_exact"].get<double>() <= 0.25);
}
