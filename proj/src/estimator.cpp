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

#include "ldp/estimator.hpp"

#include <cmath>
#include <limits>

#include "ldp/action.hpp"
#include "ldp/parallel.hpp"

namespace ldp {

namespace {

enum Outcome : std::uint8_t { kMiss = 0, kHit = 1, kDivergedMiss = 2, kDivergedHit = 3 };

TubeEstimate tally(const std::vector<std::uint8_t>& outcomes, double epsilon,
                   double delta, double T) {
  std::uint64_t hits = 0, diverged = 0;
  for (auto o : outcomes) {
    hits += (o == kHit || o == kDivergedHit);
    diverged += (o == kDivergedMiss || o == kDivergedHit);
  }
  return make_estimate(hits, outcomes.size(), diverged, epsilon, delta, T);
}

std::uint32_t path_id(std::size_t i) {
  require(i <= std::numeric_limits<std::uint32_t>::max(),
          "sample size exceeds the counter range");
  return static_cast<std::uint32_t>(i);
}

}  // namespace

std::pair<double, bool> log_prob_summary(std::uint64_t hits, std::uint64_t n,
                                         double epsilon) {
  require(n >= 1 && hits <= n, "log_prob_summary: need 0 <= hits <= n, n >= 1");
  const double eps2 = epsilon * epsilon;
  if (hits == 0)
    return {eps2 * std::log(3.0 / static_cast<double>(n)), true};
  return {eps2 * std::log(static_cast<double>(hits) / static_cast<double>(n)),
          false};
}

TubeEstimate make_estimate(std::uint64_t hits, std::uint64_t n,
                           std::uint64_t diverged, double epsilon,
                           double delta, double T) {
  TubeEstimate est;
  est.epsilon = epsilon;
  est.delta = delta;
  est.T = T;
  est.hits = hits;
  est.n = n;
  est.diverged = diverged;
  est.p_hat = static_cast<double>(hits) / static_cast<double>(n);
  const auto ci = clopper_pearson(hits, n);
  est.p_lo = ci.lo;
  est.p_hi = ci.hi;
  std::tie(est.eps2_log_p, est.is_upper_bound) =
      log_prob_summary(hits, n, epsilon);
  return est;
}

TubeEstimate tube_probability(const DiffusionModel& model, const Path& u,
                              double delta, const SimConfig& cfg,
                              std::uint64_t n, std::size_t workers) {
  require(delta > 0.0, "delta must be positive");
  require(n >= 1, "n must be positive");
  require(u.dim() == model.dim(), "tube path dimension does not match model");
  require(std::abs(u.T - cfg.T) <= 1e-9 * std::max(1.0, cfg.T),
          "tube path horizon must equal sim.T");
  const Path grid_u = resample(u, cfg.n_steps());

  std::vector<std::uint8_t> outcomes(n, kMiss);
  parallel_for(n, workers, [&](std::size_t i) {
    bool inside = true;
    try {
      run_path(model, cfg, path_id(i), [&](std::size_t k, const Vec& x) {
        inside = (x - grid_u.state(k)).norm() <= delta;
        return inside;
      });
      outcomes[i] = inside ? kHit : kMiss;
    } catch (const DivergenceError&) {
      outcomes[i] = kDivergedMiss;
    }
  });
  return tally(outcomes, cfg.epsilon, delta, cfg.T);
}

TubeEstimate exit_probability(const DiffusionModel& model, double C,
                              const SimConfig& cfg, std::uint64_t n,
                              std::size_t workers) {
  require(C > model.x0().norm(), "exit level C must exceed |x0|");
  require(n >= 1, "n must be positive");
  cfg.validate();

  std::vector<std::uint8_t> outcomes(n, kMiss);
  parallel_for(n, workers, [&](std::size_t i) {
    bool exited = false;
    try {
      run_path(model, cfg, path_id(i), [&](std::size_t, const Vec& x) {
        exited = x.norm() >= C;
        return !exited;
      });
      outcomes[i] = exited ? kHit : kMiss;
    } catch (const DivergenceError&) {
      outcomes[i] = kDivergedHit;
    }
  });
  return tally(outcomes, cfg.epsilon, C, cfg.T);
}

std::vector<LadderRow> ldp_ladder(const DiffusionModel& model, const Path& u,
                                  double delta,
                                  const std::vector<double>& eps_list,
                                  const SimConfig& base_cfg, std::uint64_t n,
                                  std::size_t workers) {
  require(!eps_list.empty(), "eps_list must be nonempty");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    require(eps_list[i] > 0.0, "eps_list entries must be positive");
    if (i > 0)
      require(eps_list[i] < eps_list[i - 1], "eps_list must be decreasing");
  }
  const ActionResult action = rate_functional(model, u);
  const double target = action.admissible
                            ? -action.value.value
                            : -std::numeric_limits<double>::infinity();
  std::vector<LadderRow> rows;
  for (double eps : eps_list) {
    SimConfig cfg = base_cfg;
    cfg.epsilon = eps;
    rows.push_back({eps, tube_probability(model, u, delta, cfg, n, workers),
                    target});
  }
  return rows;
}

TubeEstimate coupling_deviation_probability(const DiffusionModel& model,
                                            const SimConfig& cfg, double beta,
                                            double C, std::uint64_t n,
                                            std::size_t workers) {
  require(beta >= 0.0 && beta <= 1.0, "beta must lie in [0, 1]");
  require(C > 0.0, "C must be positive");
  require(n >= 1, "n must be positive");
  cfg.validate();
  const double threshold = std::pow(beta, 0.25);

  std::vector<std::uint8_t> outcomes(n, kMiss);
  parallel_for(n, workers, [&](std::size_t i) {
    try {
      const double dev = coupled_sup_deviation(model, cfg, beta, C, path_id(i));
      outcomes[i] = dev > threshold ? kHit : kMiss;
    } catch (const DivergenceError&) {
      outcomes[i] = kDivergedHit;
    }
  });
  return tally(outcomes, cfg.epsilon, threshold, cfg.T);
}

}  // namespace ldp
