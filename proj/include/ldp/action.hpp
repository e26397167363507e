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

#include <vector>

#include "ldp/common.hpp"
#include "ldp/model.hpp"
#include "ldp/path.hpp"
#include "ldp/psdlinalg.hpp"

namespace ldp {

inline constexpr double kDefaultResidualTol = 1e-6;

/// Discretized rate functional J_T(u) = 1/2 int |u' - b(u)|^2_{a^+(u)} dt.
///
/// Midpoint rule: interval k contributes dt/2 |v_k - b(m_k)|^2_{a^+(m_k)}
/// with v_k = (u_{k+1} - u_k)/dt and m_k = (u_k + u_{k+1})/2. The path is
/// inadmissible (value +inf) if it does not start at x0 or if some excess
/// velocity v_k - b(m_k) leaves range(a(m_k)).
struct ActionResult {
  ExtendedReal value;
  double constraint_residual = 0.0;  // max_k relative range residual
  double start_mismatch = 0.0;       // |u_0 - x0|
  bool admissible = true;
  std::vector<double> per_node_integrand;  // 1/2 |v_k - b(m_k)|^2_{a^+}, +inf if divergent
};

/// v_k = (u_{k+1} - u_k) / dt, one column per interval.
Mat finite_difference_velocity(const Path& path);

/// m_k = (u_k + u_{k+1}) / 2, one column per interval.
Mat midpoints(const Path& path);

ActionResult rate_functional(const DiffusionModel& model, const Path& path,
                             double rcond = kDefaultRcond,
                             double residual_tol = kDefaultResidualTol);

/// Scalar form 1/2 int (u' - b)^2 / sigma^2 dt with 0/0 = 0.
ExtendedReal rate_functional_scalar(const DiffusionModel& model,
                                    const Path& path,
                                    double residual_tol = kDefaultResidualTol);

/// Same quadrature with weight (a(m_k) + beta I)^{-1}; always finite.
double rate_functional_regularized(const DiffusionModel& model,
                                   const Path& path, double beta);

/// max_k |v_k - b(m_k)|; zero exactly on discrete flow paths.
double max_flow_defect(const DiffusionModel& model, const Path& path);

}  // namespace ldp
