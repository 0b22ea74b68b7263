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

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "nvdfs/config.hpp"
#include "nvdfs/dispatch.hpp"
#include "nvdfs/error.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw nvdfs::ConfigError("--config", "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int fail(const nvdfs::Json& record) {
  std::cerr << record.dump() << "\n";
  return record.value("exit_code", 1);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulates decoherence-free nuclear-spin registers driven through an NV centre"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
  int workers = 1;
  std::string format;
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory (default: output.directory, $NVDFS_OUT_DIR, nvdfs_out)");
  app.add_option("--set", overrides, "Dotted-path override key=value, repeatable")->take_all();
  app.add_option("--workers", workers, "Sweep worker threads")->check(CLI::PositiveNumber);
  app.add_option("--format", format, "Trajectory format")->check(CLI::IsMember({"csv", "json", "both"}));

  const std::vector<std::pair<std::string, std::string>> commands{
      {"dfs-compare", "Bloch-vector decay of the singlet-anchored qubit and a bare nuclear qubit"},
      {"prepare", "Field ramps then STIRAP from |0> into the logical |0>"},
      {"logic-flip", "STIRAP between the two logical states at the singlet degeneracy point"},
      {"stirap-discriminate", "Same pulse pair applied to both logical states"},
      {"single-c13", "STIRAP on a single-carbon register"},
      {"intuitive", "Pump-first baseline with a coarse timing search"},
      {"eig-report", "Eigenvalues and eigenvector coefficients at one field"},
      {"sweep", "Cartesian parameter sweep of another protocol"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);
  auto* schema = app.add_subcommand("schema", "Print the config JSON schema");
  schema->group("");

  if (argc > 1 && argv[1][0] != '-') {
    const std::string first = argv[1];
    const bool known = first == "schema" || std::any_of(commands.begin(), commands.end(),
                                                        [&](const auto& c) { return c.first == first; });
    if (!known) return fail({{"error", "config"}, {"message", "unknown subcommand '" + first + "'"}, {"exit_code", 2}});
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Error& e) {
    return fail({{"error", "config"}, {"message", e.what()}, {"exit_code", 2}});
  }

  try {
    if (schema->parsed()) {
      std::cout << nvdfs::config_schema().dump(2) << "\n";
      return 0;
    }
    const std::string protocol = app.get_subcommands().front()->get_name();
    const std::string text = config_path.empty() ? std::string("{}") : read_file(config_path);
    if (!format.empty()) overrides.push_back("output.format=" + format);
    const auto cfg = nvdfs::parse_config(text, protocol, overrides);
    nvdfs::DispatchOptions opt;
    if (!out_dir.empty()) opt.out_dir = out_dir;
    opt.workers = workers;
    const auto result = nvdfs::dispatch(cfg, opt);
    nvdfs::Json line = {{"status", "ok"},
                        {"protocol", protocol},
                        {"directory", result.directory.string()},
                        {"run_id", result.summary["run_id"]}};
    if (result.summary.contains("final_fidelity")) line["final_fidelity"] = result.summary["final_fidelity"];
    std::cout << line.dump() << "\n";
    return 0;
  } catch (const std::exception& e) {
    return fail(nvdfs::error_record(e));
  }
}
