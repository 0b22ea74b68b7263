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

#include <exception>
#include <filesystem>
#include <optional>
#include <string>

#include "nvdfs/config.hpp"

namespace nvdfs {

struct DispatchOptions {
  std::optional<std::string> out_dir;  // overrides output.directory
  int workers = 1;                     // sweep only
};

struct DispatchResult {
  std::filesystem::path directory;
  Json summary;
};

/// Runs the protocol named in `cfg` and writes its artifacts. Throws after
/// writing when a conservation check fails (NumericalError) or a sweep job fails.
DispatchResult dispatch(const RunConfig& cfg, const DispatchOptions& options = {});

/// Eigensystem tables for the m_s = 0 block (two carbons) or the
/// single-carbon register.
Json eigensystem_report(const EigReportParams& p);

/// 0 never; 2 config/domain, 3 numerical, 4 I/O, 1 anything else.
int exit_code(const std::exception& e);

/// {"error": kind, "message": ..., "key": ..., "exit_code": ...}
Json error_record(const std::exception& e);

}  // namespace nvdfs
