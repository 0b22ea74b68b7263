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

#include "nvdfs/output.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "nvdfs/error.hpp"

namespace nvdfs {

namespace fs = std::filesystem;

void Table::add(std::string name, std::vector<double> values) {
  if (values.size() != times.size()) {
    throw DimensionError("table column '" + name + "' has " + std::to_string(values.size()) + " rows, expected " +
                         std::to_string(times.size()));
  }
  names.push_back(std::move(name));
  columns.push_back(std::move(values));
}

const std::vector<double>& Table::column(std::string_view name) const {
  for (std::size_t j = 0; j < names.size(); ++j) {
    if (names[j] == name) return columns[j];
  }
  throw DomainError("table has no column '" + std::string(name) + "'");
}

Table select_columns(const Table& table, const std::vector<std::string>& selection) {
  if (selection.empty()) return table;
  Table out;
  out.times = table.times;
  for (const auto& name : selection) out.add(name, table.column(name));
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.close();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

void write_trajectory_csv(const fs::path& path, const Table& table) {
  std::string text = "t_us";
  for (const auto& n : table.names) text += "," + n;
  text += "\n";
  for (std::size_t i = 0; i < table.times.size(); ++i) {
    text += format_double(table.times[i]);
    for (const auto& c : table.columns) text += "," + format_double(c[i]);
    text += "\n";
  }
  write_text(path, text);
}

void write_trajectory_json(const fs::path& path, const Table& table) {
  Json j;
  j["t_us"] = table.times;
  Json cols = Json::object();
  for (std::size_t k = 0; k < table.names.size(); ++k) cols[table.names[k]] = table.columns[k];
  j["observables"] = cols;
  write_text(path, j.dump(1) + "\n");
}

std::vector<std::string> write_plot_data(const fs::path& dir, const Table& table) {
  std::vector<std::string> files;
  for (std::size_t k = 0; k < table.names.size(); ++k) {
    std::string text = "# t_us " + table.names[k] + "\n";
    for (std::size_t i = 0; i < table.times.size(); ++i) {
      text += format_double(table.times[i]) + " " + format_double(table.columns[k][i]) + "\n";
    }
    const std::string name = table.names[k] + ".dat";
    write_text(dir / name, text);
    files.push_back(name);
  }
  return files;
}

Json conservation_json(const ConservationReport& c) {
  return {{"max_trace_error", c.max_trace_error},
          {"max_hermiticity_residual", c.max_hermiticity_residual},
          {"min_eigenvalue", c.min_eigenvalue},
          {"ok", c.ok()}};
}

Json result_summary(const ProtocolResult& r) {
  Json metrics = Json::object();
  for (const auto& [k, v] : r.metrics) metrics[k] = v;
  return {{"name", r.name},
          {"final_fidelity", r.final_fidelity},
          {"peak_intermediate_population", r.peak_intermediate_population},
          {"timing",
           {{"ramp_time_us", r.timing.ramp_time},
            {"pulse_time_us", r.timing.pulse_time},
            {"total_time_us", r.timing.total_time}}},
          {"metrics", metrics},
          {"flags", r.flags},
          {"conservation", conservation_json(r.conservation)},
          {"integrator",
           {{"accepted_steps", r.stats.accepted},
            {"rejected_steps", r.stats.rejected},
            {"rhs_evaluations", r.stats.rhs_evaluations},
            {"smallest_step_us", r.stats.smallest_step},
            {"largest_step_us", r.stats.largest_step}}},
          {"parameters", r.parameters}};
}

fs::path resolve_output_dir(const std::optional<std::string>& cli_out, const OutputSettings& settings) {
  if (cli_out && !cli_out->empty()) return *cli_out;
  if (!settings.directory.empty()) return settings.directory;
  if (const char* env = std::getenv("NVDFS_OUT_DIR"); env && *env) return env;
  return "nvdfs_out";
}

void prepare_output_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  if (!fs::is_directory(dir)) throw IoError("'" + dir.string() + "' is not a directory");
  const fs::path probe = dir / ".nvdfs_write_probe";
  {
    std::ofstream out(probe);
    if (!out) throw IoError("output directory '" + dir.string() + "' is not writable");
  }
  fs::remove(probe, ec);
}

}  // namespace nvdfs
