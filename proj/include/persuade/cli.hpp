/* Copyright 2026 The persuade-ot Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License. */
#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace persuade {

enum ExitCode : int {
  kExitOk = 0,
  kExitError = 1,
  kExitInvalidConfig = 2,
  kExitNumericFailure = 3,
};

struct CliOptions {
  std::string command;  // solve | table | benchmark | export
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<int> resolution;
  std::optional<double> epsilon;  // replaces objective.epsilon, keeping its units
  std::optional<double> eta;
};

/// Runs one command. Tables and summaries go to `out`, progress and errors to
/// `err`.
int run_command(const CliOptions &options, std::ostream &out, std::ostream &err);

}  // namespace persuade
