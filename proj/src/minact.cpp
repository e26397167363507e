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

#include "ldp/minact.hpp"

#include <algorithm>
#include <cmath>

namespace ldp {

namespace {

constexpr double kArmijo = 1e-4;
constexpr double kStallDecrease = 1e-10;

Mat drift_jacobian(const DiffusionModel& model, const Vec& x, double h) {
  const auto d = x.size();
  Mat jac(d, d);
  Vec xp = x, xm = x;
  for (Eigen::Index i = 0; i < d; ++i) {
    xp[i] = x[i] + h;
    xm[i] = x[i] - h;
    jac.col(i) = (checked_drift(model, xp) - checked_drift(model, xm)) / (2 * h);
    xp[i] = xm[i] = x[i];
  }
  return jac;
}

Mat a_derivative(const DiffusionModel& model, const Vec& x, Eigen::Index i,
                 double h) {
  Vec xp = x, xm = x;
  xp[i] += h;
  xm[i] -= h;
  return (eval_a(model, xp) - eval_a(model, xm)) / (2 * h);
}

// Solves ((1/dt) L + dt I) y = g per component, with L the Dirichlet
// second-difference matrix on the interior nodes.
Mat sobolev_direction(const Mat& grad, double dt) {
  const Eigen::Index n_int = grad.cols() - 2;
  Mat out = Mat::Zero(grad.rows(), grad.cols());
  if (n_int <= 0) return out;
  const double diag = 2.0 / dt + dt;
  const double off = -1.0 / dt;
  std::vector<double> c(static_cast<std::size_t>(n_int));
  std::vector<double> y(static_cast<std::size_t>(n_int));
  for (Eigen::Index r = 0; r < grad.rows(); ++r) {
    // Thomas algorithm.
    double denom = diag;
    c[0] = off / denom;
    y[0] = grad(r, 1) / denom;
    for (Eigen::Index j = 1; j < n_int; ++j) {
      const auto sj = static_cast<std::size_t>(j);
      denom = diag - off * c[sj - 1];
      c[sj] = off / denom;
      y[sj] = (grad(r, j + 1) - off * y[sj - 1]) / denom;
    }
    for (Eigen::Index j = n_int - 2; j >= 0; --j) {
      const auto sj = static_cast<std::size_t>(j);
      y[sj] -= c[sj] * y[sj + 1];
    }
    for (Eigen::Index j = 0; j < n_int; ++j)
      out(r, j + 1) = y[static_cast<std::size_t>(j)];
  }
  return out;
}

double interior_norm(const Mat& grad) {
  if (grad.cols() <= 2) return 0.0;
  return grad.middleCols(1, grad.cols() - 2).norm();
}

}  // namespace

Mat action_gradient(const DiffusionModel& model, const Path& path,
                    double beta) {
  require(beta > 0.0, "action_gradient requires beta > 0");
  require(path.dim() == model.dim(), "path dimension does not match model");
  const auto d = static_cast<Eigen::Index>(model.dim());
  const std::size_t n = path.n_steps();
  const double dt = path.dt();
  Mat grad = Mat::Zero(d, static_cast<Eigen::Index>(n + 1));
  const Mat identity = Mat::Identity(d, d);

  for (std::size_t k = 0; k < n; ++k) {
    const Vec m = 0.5 * (path.state(k) + path.state(k + 1));
    const Vec v = (path.state(k + 1) - path.state(k)) / dt;
    const Vec e = v - checked_drift(model, m);
    const Mat a_beta = eval_a(model, m) + beta * identity;
    const Vec w = a_beta.ldlt().solve(e);  // (a + beta I)^{-1} e

    const double h = 1e-5 * (1.0 + m.norm());
    const Mat jb = drift_jacobian(model, m, h);
    Vec grad_m = -dt * (jb.transpose() * w);
    for (Eigen::Index i = 0; i < d; ++i)
      grad_m[i] -= 0.5 * dt * w.dot(a_derivative(model, m, i, h) * w);

    // term_k depends on u_k and u_{k+1} through v (slope 1/dt) and m (1/2).
    const Vec d_right = w + 0.5 * grad_m;
    const Vec d_left = -w + 0.5 * grad_m;
    grad.col(static_cast<Eigen::Index>(k)) += d_left;
    grad.col(static_cast<Eigen::Index>(k + 1)) += d_right;
  }
  grad.col(0).setZero();
  grad.col(static_cast<Eigen::Index>(n)).setZero();
  return grad;
}

MinActionResult minimize_action(const MinActionProblem& problem) {
  const DiffusionModel& model = problem.model;
  require(problem.n_steps >= 4, "minimize_action requires n_steps >= 4");
  require(problem.T > 0.0, "T must be positive");
  require(problem.beta >= 0.0, "beta must be nonnegative");
  require(problem.max_iters >= 0, "max_iters must be nonnegative");
  require(problem.grad_tol > 0.0, "grad_tol must be positive");
  require(static_cast<std::size_t>(problem.end.size()) == model.dim(),
          "end point dimension does not match model");

  MinActionResult result;
  result.beta_used = std::max(problem.beta, kBetaFloor);
  const double beta = result.beta_used;

  Path path = problem.initial_path
                  ? resample(*problem.initial_path, problem.n_steps)
                  : straight_path(model.x0(), problem.end, problem.T,
                                  problem.n_steps);
  require(path.dim() == model.dim(), "initial path dimension mismatch");
  path.T = problem.T;
  path.state(0) = model.x0();
  path.state(problem.n_steps) = problem.end;

  double value = rate_functional_regularized(model, path, beta);
  if (!std::isfinite(value))
    throw NumericError(
        "minimize_action: action of the initial path is not finite; "
        "try a larger beta or a different initial path");

  Mat grad = action_gradient(model, path, beta);
  result.grad_norm = interior_norm(grad);
  double step = 1.0;
  double last_rel_decrease = 1.0;
  int iter = 0;
  while (iter < problem.max_iters && result.grad_norm > problem.grad_tol) {
    const Mat direction = -sobolev_direction(grad, path.dt());
    const double slope = (grad.array() * direction.array()).sum();
    if (!(slope < 0.0)) break;

    step = std::min(2.0 * step, 1e6);
    Path trial = path;
    double trial_value = value;
    bool accepted = false;
    while (step > 1e-20) {
      trial.states = path.states + step * direction;
      trial_value = rate_functional_regularized(model, trial, beta);
      if (std::isfinite(trial_value) &&
          trial_value <= value + kArmijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    ++iter;
    if (!accepted) {
      last_rel_decrease = 0.0;
      break;
    }
    last_rel_decrease = (value - trial_value) / std::max(value, 1e-300);
    path = std::move(trial);
    value = trial_value;
    grad = action_gradient(model, path, beta);
    result.grad_norm = interior_norm(grad);
  }

  result.iterations = iter;
  result.converged = result.grad_norm <= problem.grad_tol ||
                     last_rel_decrease < kStallDecrease;
  result.regularized_value = value;
  if (problem.beta == 0.0) {
    result.value = rate_functional(model, path).value;
  } else if (problem.beta == beta) {
    result.value = ExtendedReal::finite(value);
  } else {
    result.value =
        ExtendedReal::finite(rate_functional_regularized(model, path,
                                                         problem.beta));
  }
  result.path = std::move(path);
  return result;
}

}  // namespace ldp
