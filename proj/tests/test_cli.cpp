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

#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ldp/cli.hpp"
#include "ldp/path.hpp"

using namespace ldp;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / ("ldp_cli_test_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cmd(const std::string& sub, const Json& cfg, const fs::path& dir,
                std::optional<std::size_t> workers = std::nullopt) {
  RunOptions opts;
  opts.config_dir = dir;
  opts.workers_override = workers;
  std::ostringstream out, err;
  const int code = run(sub, cfg, opts, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json(const fs::path& p) { return Json::parse(slurp(p)); }

Json cubic_config(const std::string& output) {
  return Json{{"seed", 7},
              {"output", output},
              {"model", {{"family", "cubic_example"}, {"x0", {0.5}}}}};
}

}  // namespace

TEST_CASE("every subcommand is registered") {
  const auto& subs = subcommands();
  for (const char* name : {"check-hypotheses", "pinv-limit", "action", "minimize",
                           "simulate", "tube-prob", "exit-prob", "ladder",
                           "coupling", "lyapunov-scan", "martingale-check"})
    CHECK(std::find(subs.begin(), subs.end(), name) != subs.end());
}

TEST_CASE("check-hypotheses on the cubic example") {
  TempDir dir("hyp");
  const auto r = run_cmd("check-hypotheses", cubic_config("out"), dir.path);
  REQUIRE(r.code == kExitOk);
  const Json report = read_json(dir.path / "out" / "hypotheses.json");
  CHECK(report["K_estimate"].get<double>() == doctest::Approx(1.0).epsilon(1e-9));
  const Json manifest = read_json(dir.path / "out" / "manifest.json");
  CHECK(manifest["tool"] == kToolName);
  CHECK(manifest["version"] == kToolVersion);
  CHECK(manifest["subcommand"] == "check-hypotheses");
  CHECK(manifest["exit_code"] == 0);
  CHECK(manifest["config"]["seed"] == 7);
  CHECK(manifest["config"]["hypotheses"]["radii"].size() == 5);
}

TEST_CASE("check-hypotheses exits 2 on a failed verdict") {
  TempDir dir("hypfail");
  Json cfg{{"output", "out"},
           {"model",
            {{"family", "linear"}, {"x0", {0.0}}, {"drift_matrix", {{1.0}}}}}};
  CHECK(run_cmd("check-hypotheses", cfg, dir.path).code == kExitVerdictFail);
}

TEST_CASE("configuration errors name the key path") {
  TempDir dir("err");
  SUBCASE("negative dt") {
    Json cfg = cubic_config("out");
    cfg["sim"] = {{"dt", -1e-3}};
    cfg["exit"] = {{"C", 2.0}, {"n", 10}};
    const auto r = run_cmd("exit-prob", cfg, dir.path);
    CHECK(r.code == kExitError);
    CHECK(r.err.find("sim.dt") != std::string::npos);
  }
  SUBCASE("unknown top-level key") {
    Json cfg = cubic_config("out");
    cfg["colour"] = "blue";
    const auto r = run_cmd("check-hypotheses", cfg, dir.path);
    CHECK(r.code == kExitError);
    CHECK(r.err.find("colour") != std::string::npos);
  }
  SUBCASE("unknown nested key") {
    Json cfg = cubic_config("out");
    cfg["model"]["sigma"] = 1.0;
    const auto r = run_cmd("check-hypotheses", cfg, dir.path);
    CHECK(r.code == kExitError);
    CHECK(r.err.find("model.sigma") != std::string::npos);
  }
  SUBCASE("unknown family") {
    Json cfg = cubic_config("out");
    cfg["model"]["family"] = "quartic";
    CHECK(run_cmd("check-hypotheses", cfg, dir.path).code == kExitError);
  }
  SUBCASE("unknown subcommand") {
    CHECK(run_cmd("frobnicate", cubic_config("out"), dir.path).code == kExitError);
  }
}

TEST_CASE("ladder writes one CSV row per epsilon") {
  TempDir dir("ladder");
  Json cfg{{"seed", 3},
           {"output", "out"},
           {"model", {{"family", "linear"}, {"x0", {0.0}}}},
           {"sim", {{"T", 1.0}, {"dt", 0.01}}},
           {"ladder",
            {{"path", {{"kind", "straight"}, {"end", {0.3}}}},
             {"delta", 0.5},
             {"eps_list", {0.5, 0.4, 0.3}},
             {"n", 200}}}};
  REQUIRE(run_cmd("ladder", cfg, dir.path).code == kExitOk);
  std::ifstream csv(dir.path / "out" / "ladder.csv");
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(csv, line)) lines.push_back(line);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "epsilon,hits,n,p_hat,p_lo,p_hi,eps2_log_p,is_upper_bound,target");
  CHECK(lines[1].rfind("0.5,", 0) == 0);
  CHECK(lines[3].rfind("0.3,", 0) == 0);
}

TEST_CASE("outputs are byte-identical across worker counts") {
  TempDir dir("determinism");
  Json cfg = cubic_config("out");
  cfg["sim"] = {{"epsilon", 0.4}, {"dt", 0.01}};
  cfg["exit"] = {{"C", 1.0}, {"n", 500}};
  REQUIRE(run_cmd("exit-prob", cfg, dir.path, 1).code == kExitOk);
  const std::string json1 = slurp(dir.path / "out" / "exit.json");
  const std::string csv1 = slurp(dir.path / "out" / "exit.csv");
  REQUIRE(run_cmd("exit-prob", cfg, dir.path, 3).code == kExitOk);
  CHECK(slurp(dir.path / "out" / "exit.json") == json1);
  CHECK(slurp(dir.path / "out" / "exit.csv") == csv1);
}

TEST_CASE("LDP_LAB_WORKERS overrides the config") {
  TempDir dir("env");
  Json cfg = cubic_config("out");
  cfg["workers"] = 1;
  cfg["lyapunov"] = {{"radii", {2.0, 4.0}}, {"probes", 4}};
  ::setenv("LDP_LAB_WORKERS", "3", 1);
  REQUIRE(run_cmd("lyapunov-scan", cfg, dir.path).code == kExitOk);
  ::unsetenv("LDP_LAB_WORKERS");
  CHECK(read_json(dir.path / "out" / "manifest.json")["workers_resolved"] == 3);
  REQUIRE(run_cmd("lyapunov-scan", cfg, dir.path, 2).code == kExitOk);
  CHECK(read_json(dir.path / "out" / "manifest.json")["workers_resolved"] == 2);
}

TEST_CASE("simulated paths round-trip as path inputs") {
  TempDir dir("roundtrip");
  Json cfg = cubic_config("out");
  cfg["sim"] = {{"epsilon", 0.3}, {"dt", 0.01}};
  REQUIRE(run_cmd("simulate", cfg, dir.path).code == kExitOk);
  const Path p = read_path_csv((dir.path / "out" / "path.csv").string());
  CHECK(p.n_steps() == 100);
  CHECK(p.states(0, 0) == 0.5);

  Json action = cubic_config("out2");
  action["action"] = {{"path", {{"kind", "csv"}, {"file", "out/path.csv"}}}};
  REQUIRE(run_cmd("action", action, dir.path).code == kExitOk);
  const Json j = read_json(dir.path / "out2" / "action.json");
  CHECK(j["admissible"] == true);
  CHECK(j.contains("scalar_value"));
}

TEST_CASE("minimize writes its path and value") {
  TempDir dir("minimize");
  Json cfg{{"output", "out"},
           {"model", {{"family", "linear"}, {"x0", {0.0}}}},
           {"minimize", {{"end", {1.0}}, {"T", 2.0}, {"n_steps", 100}}}};
  REQUIRE(run_cmd("minimize", cfg, dir.path).code == kExitOk);
  const Json j = read_json(dir.path / "out" / "minimize.json");
  CHECK(j["value"].get<double>() == doctest::Approx(1.0187).epsilon(0.01));
  const Path p = read_path_csv((dir.path / "out" / "minimize_path.csv").string());
  CHECK(p.n_steps() == 100);
}

TEST_CASE("pinv-limit and martingale-check") {
  TempDir dir("misc");
  Json pinv{{"output", "out"},
            {"pinv", {{"matrix", {{1.0, 0.0}, {0.0, 0.0}}}, {"x", {0.0, 1.0}}}}};
  REQUIRE(run_cmd("pinv-limit", pinv, dir.path).code == kExitOk);
  CHECK(read_json(dir.path / "out" / "pinv_limit.json")["kind"] == "divergent");

  Json mart{{"output", "out"},
            {"martingale", {{"alphas", {2.0, 3.0}}, {"n", 2000}, {"dt", 0.01}}}};
  const auto r = run_cmd("martingale-check", mart, dir.path);
  CHECK(r.code == kExitOk);
}
