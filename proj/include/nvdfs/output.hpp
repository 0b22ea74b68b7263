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

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nvdfs/config.hpp"
#include "nvdfs/protocols.hpp"

namespace nvdfs {

/// Time series sampled on one grid, one column per observable.
struct Table {
  std::vector<double> times;
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;

  void add(std::string name, std::vector<double> values);
  const std::vector<double>& column(std::string_view name) const;
};

/// Keeps `selection` columns in the given order; empty keeps everything.
Table select_columns(const Table& table, const std::vector<std::string>& selection);

/// %.17g text of a double, "nan"/"inf" spelled out.
std::string format_double(double v);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_trajectory_csv(const std::filesystem::path& path, const Table& table);
void write_trajectory_json(const std::filesystem::path& path, const Table& table);
/// Two-column gnuplot data file, one per observable, named <observable>.dat.
std::vector<std::string> write_plot_data(const std::filesystem::path& dir, const Table& table);

Json result_summary(const ProtocolResult& r);
Json conservation_json(const ConservationReport& c);

/// --out, then output.directory, then $NVDFS_OUT_DIR, then "nvdfs_out".
std::filesystem::path resolve_output_dir(const std::optional<std::string>& cli_out, const OutputSettings& settings);

/// Creates `dir` and checks that it accepts files.
void prepare_output_dir(const std::filesystem::path& dir);

}  // namespace nvdfs
