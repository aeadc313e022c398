// util/error.h

// Copyright 2026  serkit contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the Apache 2 License for the specific language governing permissions
// and limitations under the License.

#ifndef SERKIT_UTIL_ERROR_H_
#define SERKIT_UTIL_ERROR_H_

#include <stdexcept>
#include <string>

namespace serkit {

// Process exit codes used by the CLI. Tests rely on the distinction
// between config, data and divergence failures.
enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitConfig = 2,
  kExitData = 3,
  kExitDiverged = 4,
};

// Bad run configuration: out-of-range parameters, contradictory flags.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad or missing input data: manifests, audio files, asset pools.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Training produced NaN loss or gradients.
class DivergedError : public std::runtime_error {
 public:
  explicit DivergedError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace serkit

#endif  // SERKIT_UTIL_ERROR_H_
