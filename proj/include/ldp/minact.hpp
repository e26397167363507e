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

#include <optional>

#include "ldp/action.hpp"
#include "ldp/common.hpp"
#include "ldp/model.hpp"
#include "ldp/path.hpp"

namespace ldp {

inline constexpr double kBetaFloor = 1e-6;

struct MinActionProblem {
  DiffusionModel model;
  Vec end;
  double T = 1.0;
  std::size_t n_steps = 100;
  /// Regularization of the reported value; 0 reports the pseudoinverse action.
  double beta = 0.0;
  int max_iters = 20000;
  double grad_tol = 1e-8;
  /// Optional warm start; defaults to the straight line x0 -> end.
  std::optional<Path> initial_path;
};

struct MinActionResult {
  Path path;
  /// Action at the requested beta (pseudoinverse action when beta = 0).
  ExtendedReal value;
  /// J_beta at the beta used during optimization, max(beta, kBetaFloor).
  double regularized_value = 0.0;
  double beta_used = kBetaFloor;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Gradient of the midpoint-rule J_beta with respect to the path nodes.
///
/// Column k holds dJ/du_k; the endpoint columns are zero because endpoints
/// are pinned. Drift Jacobians and derivatives of a(x) use central
/// differences with step 1e-5 (1 + |m_k|).
Mat action_gradient(const DiffusionModel& model, const Path& path,
                    double beta);

/// Minimizes J_beta over paths with pinned endpoints.
///
/// Gradient descent in the discrete H^1 metric (each step solves a
/// tridiagonal system against the raw gradient) with Armijo backtracking,
/// c = 1e-4 and step halving.
MinActionResult minimize_action(const MinActionProblem& problem);

}  // namespace ldp
