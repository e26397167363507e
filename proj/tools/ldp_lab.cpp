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

// ldp-lab: command-line front end for the small-noise diffusion toolkit.
//
//   ldp-lab <subcommand> --config <file.json> [--output DIR] [--workers N]

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "ldp/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Large-deviation toolkit for small-noise diffusions", "ldp-lab"};
  app.set_version_flag("--version", std::string(ldp::kToolVersion));
  app.require_subcommand(1, 1);

  std::string config_file;
  std::string output;
  std::size_t workers = 0;
  for (const auto& name : ldp::subcommands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("-c,--config", config_file, "JSON config file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("-o,--output", output, "Output directory (overrides config)");
    sub->add_option("-w,--workers", workers,
                    "Worker threads (overrides config and LDP_LAB_WORKERS; 0 = auto)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ldp::kExitError;
  }

  const auto* sub = app.get_subcommands().front();
  ldp::RunOptions options;
  options.config_dir = std::filesystem::path(config_file).parent_path();
  if (options.config_dir.empty()) options.config_dir = ".";
  if (sub->count("--output")) options.output_override = output;
  if (sub->count("--workers")) options.workers_override = workers;

  ldp::Json config;
  try {
    std::ifstream is(config_file);
    config = ldp::Json::parse(is);
  } catch (const std::exception& e) {
    std::cerr << "config error: cannot parse " << config_file << ": " << e.what()
              << "\n";
    return ldp::kExitError;
  }
  return ldp::run(sub->get_name(), config, options, std::cout, std::cerr);
}
