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

#include "ldp/action.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ldp {

namespace {

constexpr double kNegligibleExcess = 1e-12;

void check_dims(const DiffusionModel& model, const Path& path) {
  require(path.dim() == model.dim(), "path dimension does not match model");
  require(path.n_steps() >= 1, "path needs at least one step");
}

// Excess velocity v_k - b(m_k) for interval k, with node context on failure.
Vec excess_velocity(const DiffusionModel& model, const Path& path,
                    std::size_t k, Vec& midpoint) {
  midpoint = 0.5 * (path.state(k) + path.state(k + 1));
  const Vec v = (path.state(k + 1) - path.state(k)) / path.dt();
  try {
    return v - checked_drift(model, midpoint);
  } catch (const EvaluationError& e) {
    throw EvaluationError(e.point(), "interval " + std::to_string(k) + ": " +
                                         e.what());
  }
}

Mat diffusion_matrix_at(const DiffusionModel& model, const Vec& m,
                        std::size_t k) {
  try {
    return eval_a(model, m);
  } catch (const EvaluationError& e) {
    throw EvaluationError(e.point(), "interval " + std::to_string(k) + ": " +
                                         e.what());
  }
}

}  // namespace

Mat finite_difference_velocity(const Path& path) {
  const auto n = static_cast<Eigen::Index>(path.n_steps());
  return (path.states.rightCols(n) - path.states.leftCols(n)) / path.dt();
}

Mat midpoints(const Path& path) {
  const auto n = static_cast<Eigen::Index>(path.n_steps());
  return 0.5 * (path.states.rightCols(n) + path.states.leftCols(n));
}

ActionResult rate_functional(const DiffusionModel& model, const Path& path,
                             double rcond, double residual_tol) {
  check_dims(model, path);
  require(residual_tol > 0.0, "residual_tol must be positive");
  ActionResult out;
  out.start_mismatch = (path.state(0) - model.x0()).norm();
  const double dt = path.dt();
  double sum = 0.0;
  bool divergent = false;
  Vec m;
  out.per_node_integrand.reserve(path.n_steps());
  for (std::size_t k = 0; k < path.n_steps(); ++k) {
    const Vec e = excess_velocity(model, path, k, m);
    const auto cls = pinv_limit_classify(
        symmetric_eigen(diffusion_matrix_at(model, m, k)), e, rcond,
        residual_tol);
    const double e_norm = e.norm();
    if (e_norm >= kNegligibleExcess) {
      out.constraint_residual =
          std::max(out.constraint_residual, cls.range_residual / e_norm);
    }
    if (cls.finite() || e_norm < kNegligibleExcess) {
      const double integrand = cls.finite() ? 0.5 * cls.value : 0.0;
      out.per_node_integrand.push_back(integrand);
      sum += dt * integrand;
    } else {
      divergent = true;
      out.per_node_integrand.push_back(std::numeric_limits<double>::infinity());
    }
  }
  const double start_tol = residual_tol * std::max(1.0, model.x0().norm());
  out.admissible = !divergent && out.start_mismatch <= start_tol &&
                   out.constraint_residual <= residual_tol;
  out.value = out.admissible ? ExtendedReal::finite(sum)
                             : ExtendedReal::infinity();
  return out;
}

ExtendedReal rate_functional_scalar(const DiffusionModel& model,
                                    const Path& path, double residual_tol) {
  check_dims(model, path);
  require(model.dim() == 1, "rate_functional_scalar requires dim = 1");
  const double start_tol = residual_tol * std::max(1.0, std::abs(model.x0()[0]));
  if (std::abs(path.states(0, 0) - model.x0()[0]) > start_tol)
    return ExtendedReal::infinity();
  const double dt = path.dt();
  double sum = 0.0;
  Vec m;
  for (std::size_t k = 0; k < path.n_steps(); ++k) {
    const double e = excess_velocity(model, path, k, m)[0];
    const double s = checked_diffusion(model, m)(0, 0);
    const double s2 = s * s;
    if (s2 == 0.0) {
      if (std::abs(e) > residual_tol) return ExtendedReal::infinity();
      continue;  // 0/0 = 0
    }
    sum += 0.5 * dt * e * e / s2;
  }
  return ExtendedReal::finite(sum);
}

double rate_functional_regularized(const DiffusionModel& model,
                                   const Path& path, double beta) {
  check_dims(model, path);
  require(beta > 0.0, "beta must be positive");
  const double dt = path.dt();
  double sum = 0.0;
  Vec m;
  for (std::size_t k = 0; k < path.n_steps(); ++k) {
    const Vec e = excess_velocity(model, path, k, m);
    sum += 0.5 * dt *
           regularized_quadratic(diffusion_matrix_at(model, m, k), e, beta);
  }
  return sum;
}

double max_flow_defect(const DiffusionModel& model, const Path& path) {
  check_dims(model, path);
  double worst = 0.0;
  Vec m;
  for (std::size_t k = 0; k < path.n_steps(); ++k)
    worst = std::max(worst, excess_velocity(model, path, k, m).norm());
  return worst;
}

}  // namespace ldp
