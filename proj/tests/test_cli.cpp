// Copyright 2026 The nvdfs Authors
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

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("nvdfs_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& args, const fs::path& err = {}) {
  std::string cmd = std::string("\"") + NVDFS_CLI_PATH + "\" " + args + " > /dev/null";
  cmd += err.empty() ? " 2> /dev/null" : " 2> \"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("prepare with defaults writes the expected artifacts") {
  const auto dir = scratch("prepare");
  REQUIRE(run("prepare --out " + (dir / "a").string()) == 0);
  for (const char* f : {"trajectory.csv", "trajectory.json", "summary.json", "fidelity.dat", "config.json"}) {
    CHECK_MESSAGE(fs::exists(dir / "a" / f), f);
  }
  const auto summary = Json::parse(slurp(dir / "a" / "summary.json"));
  CHECK(summary["final_fidelity"].get<double>() == doctest::Approx(0.874).epsilon(0.03 / 0.874));
  CHECK(summary["protocol"] == "prepare");
  CHECK(summary["conservation_ok"] == true);
  const auto csv = slurp(dir / "a" / "trajectory.csv");
  CHECK(csv.rfind("t_us,fidelity,pop_psi1,", 0) == 0);
  const auto traj = Json::parse(slurp(dir / "a" / "trajectory.json"));
  CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) == traj["t_us"].size() + 1);
  CHECK(traj["t_us"].size() >= 490);
  // the effective config reproduces the run
  REQUIRE(run("prepare --config " + (dir / "a" / "config.json").string() + " --out " + (dir / "b").string()) == 0);
  CHECK(slurp(dir / "a" / "trajectory.csv") == slurp(dir / "b" / "trajectory.csv"));
  CHECK(slurp(dir / "a" / "summary.json") == slurp(dir / "b" / "summary.json"));
}

TEST_CASE("observable selection and format") {
  const auto dir = scratch("select");
  REQUIRE(run("prepare --format csv --set 'output.observables=[\"pop_ms1\",\"fidelity\"]' --set output.report_points=20 --out " +
              dir.string()) == 0);
  CHECK_FALSE(fs::exists(dir / "trajectory.json"));
  CHECK_FALSE(fs::exists(dir / "pop_psi1.dat"));
  const auto csv = slurp(dir / "trajectory.csv");
  CHECK(csv.rfind("t_us,pop_ms1,fidelity\n", 0) == 0);
  const auto dat = slurp(dir / "fidelity.dat");
  CHECK(dat.rfind("# t_us fidelity\n0 ", 0) == 0);
}

TEST_CASE("output directory from the environment") {
  const auto dir = scratch("env");
  const std::string cmd = "NVDFS_OUT_DIR=" + (dir / "from_env").string() + " \"" + NVDFS_CLI_PATH +
                          "\" eig-report > /dev/null 2>&1";
  REQUIRE(std::system(cmd.c_str()) == 0);
  CHECK(fs::exists(dir / "from_env" / "eigensystem.csv"));
}

TEST_CASE("eig-report tabulates the m_s = 0 eigensystem") {
  const auto dir = scratch("eig");
  REQUIRE(run("eig-report --out " + dir.string()) == 0);
  const auto report = Json::parse(slurp(dir / "eigensystem.json"));
  REQUIRE(report["states"].size() == 4);
  CHECK(report["states"][1]["energy_MHz"].get<double>() == 0.0);
  CHECK(report["states"][1]["coefficients_re"][1].get<double>() == doctest::Approx(-1.0 / std::sqrt(2.0)));
  CHECK(report["max_residual_rad_per_us"].get<double>() < 1e-12);
  const auto csv = slurp(dir / "eigensystem.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  // the symmetric triplet states have equal ud and du coefficients
  for (int k : {0, 2, 3}) {
    const auto& re = report["states"][k]["coefficients_re"];
    CHECK(re[1].get<double>() == doctest::Approx(re[2].get<double>()));
  }
}

TEST_CASE("sweep over the Rabi frequency") {
  const auto dir = scratch("sweep");
  const std::string axes = "--set 'sweep.axes=[{\"key\":\"pulses.omega0\",\"values\":[\"0.25 MHz\",\"0.5 MHz\",\"1 MHz\"]}]'";
  REQUIRE(run("sweep " + axes + " --set output.report_points=50 --workers 3 --out " + (dir / "a").string()) == 0);
  const auto s = Json::parse(slurp(dir / "a" / "sweep.json"));
  REQUIRE(s["rows"].size() == 3);
  double best = 0.0;
  for (const auto& row : s["rows"]) {
    CHECK(row["status"] == "ok");
    best = std::max(best, row["final_fidelity"].get<double>());
  }
  CHECK(best > 0.5);
  CHECK(fs::exists(dir / "a" / "job_002" / "trajectory.csv"));
  REQUIRE(run("sweep " + axes + " --set output.report_points=50 --workers 1 --out " + (dir / "b").string()) == 0);
  CHECK(slurp(dir / "a" / "sweep.csv") == slurp(dir / "b" / "sweep.csv"));
}

TEST_CASE("exit codes and error records") {
  const auto dir = scratch("errors");
  const auto err = dir / "stderr.txt";
  CHECK(run("prepare --set system.T2e_star='-1 us' --out " + dir.string(), err) == 2);
  auto rec = Json::parse(slurp(err));
  CHECK(rec["error"] == "config");
  CHECK(rec["key"] == "system.T2e_star");
  CHECK(run("teleport", err) == 2);
  CHECK(Json::parse(slurp(err))["message"].get<std::string>().find("teleport") != std::string::npos);
  CHECK(run("prepare --config /nonexistent/config.json", err) == 2);
  std::ofstream(dir / "blocker") << "x";
  CHECK(run("eig-report --out " + (dir / "blocker" / "sub").string(), err) == 4);
  CHECK(Json::parse(slurp(err))["error"] == "io");
  CHECK(run("prepare --workers 0", err) == 2);
}
