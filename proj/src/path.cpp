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

#include "ldp/path.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace ldp {

Path::Path(double horizon, Mat s) : T(horizon), states(std::move(s)) {
  require(T > 0.0, "path horizon T must be positive");
  require(states.cols() >= 2, "path needs at least one step");
  require(states.rows() >= 1, "path dimension must be positive");
}

Path straight_path(const Vec& start, const Vec& end, double T,
                   std::size_t n_steps) {
  require(start.size() == end.size(), "start and end dimensions differ");
  require(n_steps >= 1, "n_steps must be >= 1");
  Mat states(start.size(), static_cast<Eigen::Index>(n_steps + 1));
  for (std::size_t k = 0; k <= n_steps; ++k) {
    const double s = static_cast<double>(k) / static_cast<double>(n_steps);
    states.col(static_cast<Eigen::Index>(k)) = (1.0 - s) * start + s * end;
  }
  // Exact endpoints regardless of rounding in the blend.
  states.col(0) = start;
  states.col(static_cast<Eigen::Index>(n_steps)) = end;
  return Path(T, std::move(states));
}

Path flow_path(const DiffusionModel& model, double T, std::size_t n_steps,
               std::size_t substeps) {
  require(n_steps >= 1 && substeps >= 1, "n_steps and substeps must be >= 1");
  const std::size_t d = model.dim();
  Mat states(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(n_steps + 1));
  Vec u = model.x0();
  Vec k1(d), k2(d), k3(d), k4(d), tmp(d);
  const double h = T / static_cast<double>(n_steps * substeps);
  states.col(0) = u;
  for (std::size_t k = 1; k <= n_steps; ++k) {
    for (std::size_t s = 0; s < substeps; ++s) {
      model.drift(u, k1);
      tmp = u + 0.5 * h * k1;
      model.drift(tmp, k2);
      tmp = u + 0.5 * h * k2;
      model.drift(tmp, k3);
      tmp = u + h * k3;
      model.drift(tmp, k4);
      u += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (!u.allFinite())
      throw NumericError("flow integration diverged at grid node " +
                         std::to_string(k));
    states.col(static_cast<Eigen::Index>(k)) = u;
  }
  return Path(T, std::move(states));
}

Path resample(const Path& path, std::size_t n_steps) {
  require(n_steps >= 1, "n_steps must be >= 1");
  if (n_steps == path.n_steps()) return path;
  const std::size_t src_n = path.n_steps();
  Mat states(static_cast<Eigen::Index>(path.dim()),
             static_cast<Eigen::Index>(n_steps + 1));
  for (std::size_t k = 0; k <= n_steps; ++k) {
    const double pos = static_cast<double>(k) * static_cast<double>(src_n) /
                       static_cast<double>(n_steps);
    auto lo = static_cast<std::size_t>(std::floor(pos));
    if (lo >= src_n) lo = src_n - 1;
    const double w = pos - static_cast<double>(lo);
    states.col(static_cast<Eigen::Index>(k)) =
        (1.0 - w) * path.state(lo) + w * path.state(lo + 1);
  }
  return Path(path.T, std::move(states));
}

void write_path_csv(std::ostream& os, const Path& path) {
  os << "t";
  for (std::size_t i = 1; i <= path.dim(); ++i) os << ",x" << i;
  os << "\n";
  for (std::size_t k = 0; k <= path.n_steps(); ++k) {
    os << format_double(path.time(k));
    for (std::size_t i = 0; i < path.dim(); ++i)
      os << "," << format_double(path.states(static_cast<Eigen::Index>(i),
                                             static_cast<Eigen::Index>(k)));
    os << "\n";
  }
}

void write_path_csv(const std::string& file, const Path& path) {
  std::ofstream os(file);
  if (!os) throw std::runtime_error("cannot open " + file + " for writing");
  write_path_csv(os, path);
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

double parse_double(const std::string& text, std::size_t row) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0)
    throw std::invalid_argument("path csv: bad number '" + text + "' on row " +
                                std::to_string(row));
  return v;
}

}  // namespace

Path read_path_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line))
    throw std::invalid_argument("path csv: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv(line);
  require(header.size() >= 2 && header[0] == "t",
          "path csv: header must be t,x1,...,xd");
  for (std::size_t i = 1; i < header.size(); ++i)
    require(header[i] == "x" + std::to_string(i),
            "path csv: header must be t,x1,...,xd");
  const std::size_t d = header.size() - 1;

  std::vector<double> times;
  std::vector<double> values;
  std::size_t row = 0;
  while (std::getline(is, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    require(fields.size() == d + 1,
            "path csv: row " + std::to_string(row) + " has wrong field count");
    times.push_back(parse_double(fields[0], row));
    for (std::size_t i = 1; i <= d; ++i)
      values.push_back(parse_double(fields[i], row));
  }
  require(times.size() >= 2, "path csv: need at least two rows");
  const std::size_t n = times.size() - 1;
  const double T = times.back();
  require(times.front() == 0.0 && T > 0.0, "path csv: time must start at 0");
  for (std::size_t k = 0; k <= n; ++k) {
    const double expected = T * static_cast<double>(k) / static_cast<double>(n);
    require(std::abs(times[k] - expected) <= 1e-9 * std::max(1.0, T),
            "path csv: time grid is not uniform at row " + std::to_string(k + 1));
  }
  Mat states(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(n + 1));
  for (std::size_t k = 0; k <= n; ++k)
    for (std::size_t i = 0; i < d; ++i)
      states(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
          values[k * d + i];
  return Path(T, std::move(states));
}

Path read_path_csv(const std::string& file) {
  std::ifstream is(file);
  if (!is) throw std::runtime_error("cannot open " + file);
  return read_path_csv(is);
}

}  // namespace ldp
