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

#include <cstdint>
#include <utility>
#include <vector>

#include "ldp/model.hpp"
#include "ldp/path.hpp"
#include "ldp/sde.hpp"
#include "ldp/stats.hpp"

namespace ldp {

/// Crude Monte Carlo estimate of an event probability.
///
/// `delta` is the event threshold: the tube radius for tube events, the
/// level C for exit events and beta^{1/4} for coupling deviations.
struct TubeEstimate {
  double epsilon = 0.0;
  double delta = 0.0;
  double T = 0.0;
  std::uint64_t hits = 0;
  std::uint64_t n = 0;
  std::uint64_t diverged = 0;
  double p_hat = 0.0;
  double p_lo = 0.0;
  double p_hi = 1.0;
  /// eps^2 log p_hat, or eps^2 log(3/n) when hits = 0.
  double eps2_log_p = 0.0;
  /// Set when eps2_log_p is the rule-of-three upper bound.
  bool is_upper_bound = false;
};

struct LadderRow {
  double epsilon = 0.0;
  TubeEstimate estimate;
  /// -J_T(u); -inf when u is inadmissible.
  double target = 0.0;
};

/// (eps^2 ln(hits/n), false) for hits > 0, (eps^2 ln(3/n), true) otherwise.
std::pair<double, bool> log_prob_summary(std::uint64_t hits, std::uint64_t n,
                                         double epsilon);

TubeEstimate make_estimate(std::uint64_t hits, std::uint64_t n,
                           std::uint64_t diverged, double epsilon,
                           double delta, double T);

/// P(max_k |X_k - u_k| <= delta) over the simulation grid. u is resampled
/// linearly onto the grid when step counts differ. Diverged paths are misses.
TubeEstimate tube_probability(const DiffusionModel& model, const Path& u,
                              double delta, const SimConfig& cfg,
                              std::uint64_t n, std::size_t workers = 1);

/// P(Theta_C <= T) with Theta_C the first grid time |X_k| >= C.
/// Diverged paths count as exits.
TubeEstimate exit_probability(const DiffusionModel& model, double C,
                              const SimConfig& cfg, std::uint64_t n,
                              std::size_t workers = 1);

/// One tube estimate per epsilon (common seed), each carrying -J_T(u).
std::vector<LadderRow> ldp_ladder(const DiffusionModel& model, const Path& u,
                                  double delta,
                                  const std::vector<double>& eps_list,
                                  const SimConfig& base_cfg, std::uint64_t n,
                                  std::size_t workers = 1);

/// P(sup_{t <= tau_C ^ T} |X^{eps,beta}_t - X^eps_t| > beta^{1/4}).
/// Diverged pairs count as hits.
TubeEstimate coupling_deviation_probability(const DiffusionModel& model,
                                            const SimConfig& cfg, double beta,
                                            double C, std::uint64_t n,
                                            std::size_t workers = 1);

}  // namespace ldp
