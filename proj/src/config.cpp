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

#include "ldp/config.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ldp {

ConfigReader::ConfigReader(const Json& object, std::string path)
    : object_(object), path_(std::move(path)) {
  if (!object_.is_object()) throw ConfigError(path_, "expected a JSON object");
}

std::string ConfigReader::key_path(const std::string& key) const {
  return path_.empty() ? key : path_ + "." + key;
}

bool ConfigReader::has(const std::string& key) const {
  return object_.contains(key);
}

void ConfigReader::fail(const std::string& key, const std::string& msg) const {
  throw ConfigError(key_path(key), msg);
}

const Json& ConfigReader::require_key(const std::string& key) const {
  if (!object_.contains(key)) fail(key, "missing required key");
  return object_.at(key);
}

const Json& ConfigReader::raw(const std::string& key) const {
  return require_key(key);
}

double ConfigReader::number(const std::string& key,
                            std::optional<double> fallback) {
  seen_.push_back(key);
  double v = 0.0;
  if (!object_.contains(key)) {
    if (!fallback) fail(key, "missing required key");
    v = *fallback;
  } else {
    const Json& j = object_.at(key);
    if (!j.is_number()) fail(key, "expected a number");
    v = j.get<double>();
    if (!std::isfinite(v)) fail(key, "must be finite");
  }
  resolved_[key] = v;
  return v;
}

double ConfigReader::positive(const std::string& key,
                              std::optional<double> fallback) {
  const double v = number(key, fallback);
  if (!(v > 0.0)) fail(key, "must be positive");
  return v;
}

double ConfigReader::nonnegative(const std::string& key,
                                 std::optional<double> fallback) {
  const double v = number(key, fallback);
  if (!(v >= 0.0)) fail(key, "must be nonnegative");
  return v;
}

std::int64_t ConfigReader::integer(const std::string& key,
                                   std::optional<std::int64_t> fallback,
                                   std::int64_t min_value) {
  seen_.push_back(key);
  std::int64_t v = 0;
  if (!object_.contains(key)) {
    if (!fallback) fail(key, "missing required key");
    v = *fallback;
  } else {
    const Json& j = object_.at(key);
    if (j.is_number_integer()) {
      v = j.get<std::int64_t>();
    } else if (j.is_number_float() && std::floor(j.get<double>()) == j.get<double>() &&
               std::abs(j.get<double>()) < 9.0e15) {
      v = static_cast<std::int64_t>(j.get<double>());
    } else {
      fail(key, "expected an integer");
    }
  }
  if (v < min_value) fail(key, "must be >= " + std::to_string(min_value));
  resolved_[key] = v;
  return v;
}

bool ConfigReader::boolean(const std::string& key, std::optional<bool> fallback) {
  seen_.push_back(key);
  bool v = false;
  if (!object_.contains(key)) {
    if (!fallback) fail(key, "missing required key");
    v = *fallback;
  } else {
    const Json& j = object_.at(key);
    if (!j.is_boolean()) fail(key, "expected true or false");
    v = j.get<bool>();
  }
  resolved_[key] = v;
  return v;
}

std::string ConfigReader::string(const std::string& key,
                                 std::optional<std::string> fallback) {
  seen_.push_back(key);
  std::string v;
  if (!object_.contains(key)) {
    if (!fallback) fail(key, "missing required key");
    v = *fallback;
  } else {
    const Json& j = object_.at(key);
    if (!j.is_string()) fail(key, "expected a string");
    v = j.get<std::string>();
  }
  resolved_[key] = v;
  return v;
}

std::vector<double> ConfigReader::numbers(
    const std::string& key, std::optional<std::vector<double>> fallback) {
  seen_.push_back(key);
  std::vector<double> v;
  if (!object_.contains(key)) {
    if (!fallback) fail(key, "missing required key");
    v = *fallback;
  } else {
    const Json& j = object_.at(key);
    if (!j.is_array()) fail(key, "expected an array of numbers");
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (!j[i].is_number())
        fail(key + "[" + std::to_string(i) + "]", "expected a number");
      const double x = j[i].get<double>();
      if (!std::isfinite(x))
        fail(key + "[" + std::to_string(i) + "]", "must be finite");
      v.push_back(x);
    }
  }
  resolved_[key] = v;
  return v;
}

Vec ConfigReader::vector(const std::string& key, std::optional<Vec> fallback) {
  std::optional<std::vector<double>> fb;
  if (fallback) fb = std::vector<double>(fallback->data(),
                                         fallback->data() + fallback->size());
  const auto v = numbers(key, fb);
  if (v.empty()) fail(key, "must be nonempty");
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Mat ConfigReader::matrix(const std::string& key, std::optional<Mat> fallback) {
  seen_.push_back(key);
  Mat m;
  if (!object_.contains(key)) {
    if (!fallback) fail(key, "missing required key");
    m = *fallback;
  } else {
    const Json& j = object_.at(key);
    if (!j.is_array() || j.empty() || !j[0].is_array())
      fail(key, "expected a nonempty array of rows");
    const std::size_t rows = j.size();
    const std::size_t cols = j[0].size();
    m.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
      const std::string row_key = key + "[" + std::to_string(r) + "]";
      if (!j[r].is_array() || j[r].size() != cols)
        fail(row_key, "rows must have equal length");
      for (std::size_t c = 0; c < cols; ++c) {
        if (!j[r][c].is_number())
          fail(row_key + "[" + std::to_string(c) + "]", "expected a number");
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            j[r][c].get<double>();
      }
    }
    if (!m.allFinite()) fail(key, "entries must be finite");
  }
  resolved_[key] = to_json(m);
  return m;
}

ConfigReader ConfigReader::child(const std::string& key) {
  seen_.push_back(key);
  return ConfigReader(require_key(key), key_path(key));
}

void ConfigReader::attach(const std::string& key, const Json& resolved_child) {
  if (std::find(seen_.begin(), seen_.end(), key) == seen_.end())
    seen_.push_back(key);
  resolved_[key] = resolved_child;
}

void ConfigReader::finish() {
  for (const auto& item : object_.items()) {
    if (std::find(seen_.begin(), seen_.end(), item.key()) == seen_.end())
      fail(item.key(), "unknown key");
  }
}

namespace {

Mat identity_like(Eigen::Index d) { return Mat::Identity(d, d); }

}  // namespace

DiffusionModel model_from_json(ConfigReader& reader) {
  const std::string family = reader.string("family");
  if (family == "cubic_example") {
    const Vec x0 = reader.vector("x0", Vec::Zero(1));
    if (x0.size() != 1)
      throw ConfigError(reader.key_path("x0"), "cubic_example is scalar");
    reader.finish();
    return make_cubic_example(x0[0]);
  }
  if (family == "linear") {
    const Vec x0 = reader.vector("x0");
    const auto d = x0.size();
    const Mat A = reader.matrix("drift_matrix", -identity_like(d));
    const Vec c = reader.vector("drift_offset", Vec::Zero(d));
    const Mat S = reader.matrix("diffusion_matrix", identity_like(d));
    if (A.rows() != d || A.cols() != d)
      throw ConfigError(reader.key_path("drift_matrix"), "must be dim x dim");
    if (c.size() != d)
      throw ConfigError(reader.key_path("drift_offset"), "must have length dim");
    if (S.rows() != d || S.cols() != d)
      throw ConfigError(reader.key_path("diffusion_matrix"),
                        "must be dim x dim");
    reader.finish();
    return make_linear_model(A, c, S, x0);
  }
  if (family == "gradient_polynomial") {
    const Vec x0 = reader.vector("x0");
    const auto coeffs = reader.numbers("coefficients");
    if (coeffs.empty())
      throw ConfigError(reader.key_path("coefficients"), "must be nonempty");
    const double scale = reader.nonnegative("sigma_scale", 1.0);
    const double power = reader.number("sigma_power", 0.0);
    reader.finish();
    return make_gradient_polynomial(coeffs, scale, power, x0);
  }
  throw ConfigError(reader.key_path("family"),
                    "unknown model family '" + family +
                        "' (expected linear, cubic_example or "
                        "gradient_polynomial)");
}

SimConfig sim_from_json(ConfigReader& reader, std::uint64_t seed) {
  SimConfig cfg;
  cfg.epsilon = reader.nonnegative("epsilon", 0.1);
  cfg.T = reader.positive("T", 1.0);
  cfg.dt = reader.positive("dt", 1e-3);
  const std::string scheme = reader.string("scheme", "tamed");
  try {
    cfg.scheme = scheme_from_string(scheme);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(reader.key_path("scheme"), e.what());
  }
  cfg.seed = seed;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(reader.key_path("dt"), e.what());
  }
  reader.finish();
  return cfg;
}

Path path_from_json(ConfigReader& reader, const DiffusionModel& model,
                    const std::filesystem::path& base_dir,
                    std::optional<double> default_T,
                    std::optional<std::size_t> default_steps) {
  const std::string kind = reader.string("kind");
  if (kind == "csv") {
    const std::string file = reader.string("file");
    reader.finish();
    std::filesystem::path p(file);
    if (p.is_relative()) p = base_dir / p;
    try {
      return read_path_csv(p.string());
    } catch (const std::exception& e) {
      throw ConfigError(reader.key_path("file"), e.what());
    }
  }
  const double T = reader.positive("T", default_T);
  const auto n = static_cast<std::size_t>(reader.integer(
      "n_steps",
      default_steps ? std::optional<std::int64_t>(
                          static_cast<std::int64_t>(*default_steps))
                    : std::nullopt,
      1));
  if (kind == "flow") {
    reader.finish();
    return flow_path(model, T, n);
  }
  if (kind == "straight" || kind == "minimizer") {
    const Vec end = reader.vector("end");
    if (static_cast<std::size_t>(end.size()) != model.dim())
      throw ConfigError(reader.key_path("end"), "must have length dim");
    if (kind == "straight") {
      reader.finish();
      return straight_path(model.x0(), end, T, n);
    }
    MinActionProblem problem{model, end, T, n, 0.0, 20000, 1e-8, std::nullopt};
    problem.beta = reader.nonnegative("beta", 0.0);
    problem.max_iters = static_cast<int>(reader.integer("max_iters", 20000));
    problem.grad_tol = reader.positive("grad_tol", 1e-8);
    reader.finish();
    if (n < 4) throw ConfigError(reader.key_path("n_steps"), "must be >= 4");
    return minimize_action(problem).path;
  }
  throw ConfigError(reader.key_path("kind"),
                    "unknown path kind '" + kind +
                        "' (expected flow, straight, csv or minimizer)");
}

Json json_number(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

Json to_json(const Vec& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(json_number(v[i]));
  return out;
}

Json to_json(const Mat& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back(json_number(m(r, c)));
    out.push_back(row);
  }
  return out;
}

namespace {

Json numbers_json(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(json_number(x));
  return out;
}

Json extended_json(const ExtendedReal& v) {
  return v.infinite ? Json("inf") : Json(v.value);
}

}  // namespace

Json to_json(const HypothesisReport& r) {
  Json out;
  out["radii"] = numbers_json(r.radii);
  out["inward_values"] = numbers_json(r.inward_values);
  out["balance_values"] = numbers_json(r.balance_values);
  out["lipschitz_estimate"] = json_number(r.lipschitz_estimate);
  out["K_estimate"] = json_number(r.K_estimate);
  out["L_used"] = r.L_used;
  out["verdicts"] = {{"H1", to_string(r.h1)},
                     {"H2", to_string(r.h2)},
                     {"H3", to_string(r.h3)}};
  out["h3_offending_point"] =
      r.h3_offending_point ? to_json(*r.h3_offending_point) : Json(nullptr);
  return out;
}

Json to_json(const PinvResult& r) {
  return {{"pinv", to_json(r.pinv)},
          {"rank", r.rank},
          {"eigenvalues", to_json(r.eigenvalues)},
          {"cutoff", r.cutoff}};
}

Json to_json(const LimitClassification& c) {
  Json out;
  out["kind"] = c.finite() ? "finite" : "divergent";
  out["value"] = c.finite() ? Json(c.value) : Json(nullptr);
  out["range_residual"] = c.range_residual;
  out["rank"] = c.rank;
  out["cutoff"] = c.cutoff;
  return out;
}

Json to_json(const ActionResult& r) {
  return {{"value", extended_json(r.value)},
          {"admissible", r.admissible},
          {"constraint_residual", json_number(r.constraint_residual)},
          {"start_mismatch", json_number(r.start_mismatch)},
          {"per_node_integrand", numbers_json(r.per_node_integrand)}};
}

Json to_json(const MinActionResult& r) {
  return {{"value", extended_json(r.value)},
          {"regularized_value", json_number(r.regularized_value)},
          {"beta_used", r.beta_used},
          {"grad_norm", json_number(r.grad_norm)},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"T", r.path.T},
          {"n_steps", r.path.n_steps()}};
}

Json to_json(const TubeEstimate& e) {
  return {{"epsilon", e.epsilon},
          {"delta", e.delta},
          {"T", e.T},
          {"hits", e.hits},
          {"n", e.n},
          {"diverged", e.diverged},
          {"p_hat", e.p_hat},
          {"p_lo", e.p_lo},
          {"p_hi", e.p_hi},
          {"eps2_log_p", json_number(e.eps2_log_p)},
          {"is_upper_bound", e.is_upper_bound}};
}

Json to_json(const LadderRow& row) {
  Json out = to_json(row.estimate);
  out["target"] = json_number(row.target);
  return out;
}

Json to_json(const LyapunovScan& s) {
  return {{"c", s.c},
          {"L", s.L},
          {"radii", numbers_json(s.radii)},
          {"max_DV", numbers_json(s.max_DV)},
          {"bound_values", numbers_json(s.bound_values)},
          {"chain_violations", s.chain_violations},
          {"verdict", to_string(s.verdict)},
          {"warning", s.warning ? Json(*s.warning) : Json(nullptr)}};
}

Json to_json(const MartingaleReport& r) {
  return {{"kind", to_string(r.kind)},
          {"alpha", r.alpha},
          {"B", r.B},
          {"T", r.T},
          {"dt", r.dt},
          {"n", r.n},
          {"hits", r.hits},
          {"frequency", r.frequency},
          {"bound", r.bound},
          {"std_error", r.std_error},
          {"pass", r.pass}};
}

std::string estimate_csv_header() {
  return "epsilon,hits,n,p_hat,p_lo,p_hi,eps2_log_p,is_upper_bound,target";
}

std::string estimate_csv_row(const TubeEstimate& e,
                             std::optional<double> target) {
  std::ostringstream os;
  os << format_double(e.epsilon) << ',' << e.hits << ',' << e.n << ','
     << format_double(e.p_hat) << ',' << format_double(e.p_lo) << ','
     << format_double(e.p_hi) << ',' << format_double(e.eps2_log_p) << ','
     << (e.is_upper_bound ? "true" : "false") << ',';
  if (target) os << format_double(*target);
  return os.str();
}

}  // namespace ldp
