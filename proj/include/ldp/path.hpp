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

#include <iosfwd>
#include <string>

#include "ldp/common.hpp"
#include "ldp/model.hpp"

namespace ldp {

/// A path sampled on the uniform grid t_k = k T / n, k = 0..n.
/// Column k of `states` is the state at t_k.
struct Path {
  double T = 1.0;
  Mat states;

  Path() = default;
  Path(double horizon, Mat s);

  std::size_t dim() const { return static_cast<std::size_t>(states.rows()); }
  std::size_t n_steps() const {
    return states.cols() > 0 ? static_cast<std::size_t>(states.cols() - 1) : 0;
  }
  double dt() const { return T / static_cast<double>(n_steps()); }
  double time(std::size_t k) const {
    return T * static_cast<double>(k) / static_cast<double>(n_steps());
  }
  auto state(std::size_t k) const {
    return states.col(static_cast<Eigen::Index>(k));
  }
  auto state(std::size_t k) { return states.col(static_cast<Eigen::Index>(k)); }
};

/// Linear interpolation between `start` and `end`.
Path straight_path(const Vec& start, const Vec& end, double T,
                   std::size_t n_steps);

/// Solution of du/dt = b(u), u(0) = x0, sampled on the grid (classical RK4
/// with `substeps` internal steps per grid interval).
Path flow_path(const DiffusionModel& model, double T, std::size_t n_steps,
               std::size_t substeps = 16);

/// Piecewise-linear resampling of `path` onto a grid with `n_steps` steps.
Path resample(const Path& path, std::size_t n_steps);

/// CSV with header `t,x1,...,xd` and one row per grid node.
void write_path_csv(std::ostream& os, const Path& path);
void write_path_csv(const std::string& file, const Path& path);

/// Reads a path CSV; times must form a uniform grid starting at 0.
Path read_path_csv(std::istream& is);
Path read_path_csv(const std::string& file);

}  // namespace ldp
