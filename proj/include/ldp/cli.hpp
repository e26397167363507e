// Copyright 2026 The ldp-lab Authors.
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

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ldp/config.hpp"

namespace ldp {

inline constexpr const char* kToolName = "ldp-lab";
inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kExitOk = 0, kExitError = 1, kExitVerdictFail = 2 };

struct RunOptions {
  /// Directory that relative file references in the config resolve against.
  std::filesystem::path config_dir = ".";
  std::optional<std::filesystem::path> output_override;
  std::optional<std::size_t> workers_override;
};

const std::vector<std::string>& subcommands();

/// Runs one subcommand against a parsed config. Writes reports into the
/// output directory and a one-line summary to `out`; errors go to `err`.
/// Returns 0 on success, 2 when a verdict fails, 1 on any error.
int run(const std::string& subcommand, const Json& config,
        const RunOptions& options, std::ostream& out, std::ostream& err);

}  // namespace ldp
