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

#include <stdexcept>
#include <string>

namespace nvdfs {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree (embedding, products, restrictions).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An input falls outside the domain of a closed-form expression.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Time integration failed (step underflow, step budget exhausted,
/// conservation violated).
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration. Carries the dotted key path of the offending entry.
class ConfigError : public Error {
 public:
  ConfigError(std::string key_path, const std::string& message)
      : Error(key_path.empty() ? message : key_path + ": " + message),
        key_path_(std::move(key_path)) {}

  const std::string& key_path() const noexcept { return key_path_; }

 private:
  std::string key_path_;
};

/// Filesystem failures while writing run artifacts.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace nvdfs
