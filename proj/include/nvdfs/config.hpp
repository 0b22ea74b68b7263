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

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nvdfs/protocols.hpp"

namespace nvdfs {

/// Physical dimension of a unit-suffixed config value.
enum class Quantity { frequency, gyromagnetic, time, field, field_rate, angle };

/// Parses "<number> <unit>" and returns the value in internal units
/// (rad/us, rad/(us G), us, G, G/us, rad). Frequencies given in Hz-type
/// units are cyclic and multiplied by 2 pi.
double parse_quantity(std::string_view text, Quantity kind, const std::string& key_path);

/// Re-expresses "<number> <unit>" in `canonical_unit` as a canonical string.
std::string canonical_quantity(std::string_view text, Quantity kind, std::string_view canonical_unit,
                               const std::string& key_path);

/// Config subcommands that run a protocol or a report.
const std::vector<std::string>& protocol_names();
bool is_protocol(std::string_view name);

/// Observables a protocol can write, in default column order.
std::vector<std::string> protocol_observables(std::string_view protocol);

/// Validated configuration with every default filled in. `effective` holds
/// canonical strings only, so serialize -> parse is a fixed point.
struct RunConfig {
  std::string protocol;
  Json effective;
};

/// Strict parse of JSON config text for `protocol` (empty: take
/// protocol.name from the text). `overrides` are dotted key=value pairs
/// applied before validation; values are read as JSON, else as strings.
RunConfig parse_config(std::string_view text, std::string_view protocol = {},
                       std::span<const std::string> overrides = {});

std::string serialize_config(const RunConfig& cfg);

/// Effective config of `protocol` with no user input.
Json default_config(std::string_view protocol);

/// JSON Schema describing every accepted key.
Json config_schema();

/// Every leaf key path the parser accepts (array elements as "[]").
std::vector<std::string> config_keys();

/// Stable 64-bit FNV-1a digest of the effective config, output section excluded.
std::string run_id(const RunConfig& cfg);

struct OutputSettings {
  std::string directory;
  std::string format = "both";
  std::vector<std::string> observables;
};

struct EigReportParams {
  RegisterConfig reg;
  MagneticField field;
};

struct SweepAxis {
  std::string key;
  std::vector<Json> values;
};

struct SweepSpec {
  std::string protocol;
  std::vector<SweepAxis> axes;
};

OutputSettings output_settings(const RunConfig& cfg);
DfsParams dfs_params(const RunConfig& cfg);
PreparationParams preparation_params(const RunConfig& cfg);
LogicFlipParams logic_flip_params(const RunConfig& cfg);
SingleC13Params single_c13_params(const RunConfig& cfg);
IntuitiveParams intuitive_params(const RunConfig& cfg);
EigReportParams eig_report_params(const RunConfig& cfg);
SweepSpec sweep_spec(const RunConfig& cfg);

/// Parses the config of one sweep job: the sweep's base config re-targeted
/// at the swept protocol with the axis values applied.
RunConfig sweep_job_config(const RunConfig& sweep, std::span<const std::pair<std::string, Json>> assignment);

}  // namespace nvdfs
