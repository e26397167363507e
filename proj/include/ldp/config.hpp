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

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ldp/action.hpp"
#include "ldp/estimator.hpp"
#include "ldp/minact.hpp"
#include "ldp/model.hpp"
#include "ldp/psdlinalg.hpp"
#include "ldp/sde.hpp"
#include "ldp/verify.hpp"

namespace ldp {

using Json = nlohmann::ordered_json;

/// Configuration error naming the offending key path, e.g. "sim.dt".
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key_path, const std::string& msg)
      : std::invalid_argument(key_path + ": " + msg),
        key_path_(std::move(key_path)) {}
  const std::string& key_path() const noexcept { return key_path_; }

 private:
  std::string key_path_;
};

/// Strict reader over one JSON object.
///
/// Every accessor records the value it returns (defaults included) into
/// `resolved()`. `finish()` rejects keys that were never read.
class ConfigReader {
 public:
  ConfigReader(const Json& object, std::string path);

  const std::string& path() const { return path_; }
  std::string key_path(const std::string& key) const;
  bool has(const std::string& key) const;

  double number(const std::string& key, std::optional<double> fallback = {});
  double positive(const std::string& key, std::optional<double> fallback = {});
  double nonnegative(const std::string& key,
                     std::optional<double> fallback = {});
  std::int64_t integer(const std::string& key,
                       std::optional<std::int64_t> fallback = {},
                       std::int64_t min_value = 0);
  bool boolean(const std::string& key, std::optional<bool> fallback = {});
  std::string string(const std::string& key,
                     std::optional<std::string> fallback = {});
  std::vector<double> numbers(const std::string& key,
                              std::optional<std::vector<double>> fallback = {});
  Vec vector(const std::string& key, std::optional<Vec> fallback = {});
  Mat matrix(const std::string& key, std::optional<Mat> fallback = {});

  /// Nested strict reader; the sub-object's resolved form is attached on
  /// finish() of the child via `attach`.
  ConfigReader child(const std::string& key);
  void attach(const std::string& key, const Json& resolved_child);
  const Json& raw(const std::string& key) const;

  void finish();
  const Json& resolved() const { return resolved_; }

 private:
  const Json& require_key(const std::string& key) const;
  [[noreturn]] void fail(const std::string& key, const std::string& msg) const;

  const Json& object_;
  std::string path_;
  Json resolved_ = Json::object();
  std::vector<std::string> seen_;
};

DiffusionModel model_from_json(ConfigReader& reader);
SimConfig sim_from_json(ConfigReader& reader, std::uint64_t seed);

/// Path specification:
///   {"kind": "flow", "T", "n_steps"}
///   {"kind": "straight", "T", "n_steps", "end"}
///   {"kind": "csv", "file"}            (relative to `base_dir`)
///   {"kind": "minimizer", "T", "n_steps", "end", "beta", "max_iters", "grad_tol"}
/// T and n_steps default to the supplied values when given.
Path path_from_json(ConfigReader& reader, const DiffusionModel& model,
                    const std::filesystem::path& base_dir,
                    std::optional<double> default_T = {},
                    std::optional<std::size_t> default_steps = {});

// Report serialization. Infinite doubles are written as "inf" / "-inf".

Json json_number(double v);
Json to_json(const Vec& v);
Json to_json(const Mat& m);
Json to_json(const HypothesisReport& r);
Json to_json(const PinvResult& r);
Json to_json(const LimitClassification& c);
Json to_json(const ActionResult& r);
Json to_json(const MinActionResult& r);
Json to_json(const TubeEstimate& e);
Json to_json(const LadderRow& row);
Json to_json(const LyapunovScan& s);
Json to_json(const MartingaleReport& r);

/// Header `epsilon,hits,n,p_hat,p_lo,p_hi,eps2_log_p,is_upper_bound,target`.
std::string estimate_csv_header();
/// One CSV row; an empty target column when `target` is absent.
std::string estimate_csv_row(const TubeEstimate& e,
                             std::optional<double> target = {});

}  // namespace ldp
