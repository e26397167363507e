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

#include "ldp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ldp/parallel.hpp"
#include "ldp/rng.hpp"
#include "ldp/stats.hpp"

namespace ldp {

double lyapunov_V(const Vec& x, double c) {
  require(c > 0.0, "c must be positive");
  const double r = x.norm();
  return c * r * r / (1.0 + r);
}

double lyapunov_r(const Vec& x) {
  const double r = x.norm();
  return (2.0 + r) * r / ((1.0 + r) * (1.0 + r));
}

Vec lyapunov_grad(const Vec& x, double c) {
  require(c > 0.0, "c must be positive");
  const double norm = x.norm();
  if (norm == 0.0) return Vec::Zero(x.size());
  return c * lyapunov_r(x) * x / norm;
}

double dv_operator(const DiffusionModel& model, const Vec& x, double c) {
  const Vec g = lyapunov_grad(x, c);
  return g.dot(checked_drift(model, x)) + 0.5 * g.dot(eval_a(model, x) * g);
}

double dv_upper_bound(const DiffusionModel& model, const Vec& x, double c) {
  const double norm = x.norm();
  if (norm == 0.0) return 0.0;
  return -0.5 * c * lyapunov_r(x) * std::abs(x.dot(checked_drift(model, x))) /
         norm;
}

namespace {

bool chain_fails(double dv, double bound, double slack) {
  const double tol = slack * std::max(1.0, std::abs(bound));
  return dv > bound + tol || bound > tol;
}

}  // namespace

std::size_t lyapunov_chain_violations(const DiffusionModel& model, double c,
                                      const std::vector<Vec>& points,
                                      double slack) {
  std::size_t violations = 0;
  for (const Vec& x : points)
    violations += chain_fails(dv_operator(model, x, c),
                              dv_upper_bound(model, x, c), slack);
  return violations;
}

LyapunovScan lyapunov_scan(const DiffusionModel& model, double c, double L,
                           const std::vector<double>& radii, int probes,
                           std::uint64_t seed,
                           std::optional<double> K_estimate, double slack) {
  require(c > 0.0, "c must be positive");
  require(L > 0.0, "L must be positive");
  require(!radii.empty(), "radii must be nonempty");
  require(probes >= 1, "probes must be >= 1");
  LyapunovScan scan;
  scan.c = c;
  scan.L = L;
  scan.radii = radii;
  if (K_estimate && *K_estimate > 0.0 && c > 1.0 / *K_estimate)
    scan.warning = "c exceeds 1/K_estimate; the drift bound is not guaranteed";

  bool outer_nonpositive = true;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    require(radii[i] > 0.0, "radii must be positive");
    double worst = -std::numeric_limits<double>::infinity();
    double worst_bound = 0.0;
    for (const Vec& x : shell_probes(model.dim(), radii[i], probes, seed,
                                     static_cast<std::uint32_t>(i))) {
      const double dv = dv_operator(model, x, c);
      const double bound = dv_upper_bound(model, x, c);
      if (dv > worst) {
        worst = dv;
        worst_bound = bound;
      }
      if (radii[i] > L && chain_fails(dv, bound, slack)) ++scan.chain_violations;
    }
    scan.max_DV.push_back(worst);
    scan.bound_values.push_back(worst_bound);
    if (radii[i] > L && worst > 0.0) outer_nonpositive = false;
  }
  const bool any_outer =
      std::any_of(radii.begin(), radii.end(), [L](double r) { return r > L; });
  if (!outer_nonpositive || scan.chain_violations > 0)
    scan.verdict = Verdict::kFail;
  else if (any_outer)
    scan.verdict = Verdict::kInconclusivePass;
  else
    scan.verdict = Verdict::kInconclusive;
  return scan;
}

MartingaleKind martingale_kind_from_string(const std::string& s) {
  if (s == "a") return MartingaleKind::kA;
  if (s == "b") return MartingaleKind::kB;
  if (s == "c") return MartingaleKind::kC;
  if (s == "d") return MartingaleKind::kD;
  throw std::invalid_argument("unsupported martingale inequality kind '" + s +
                              "' (expected a, b, c or d)");
}

std::string to_string(MartingaleKind k) {
  switch (k) {
    case MartingaleKind::kA:
      return "a";
    case MartingaleKind::kB:
      return "b";
    case MartingaleKind::kC:
      return "c";
    case MartingaleKind::kD:
      return "d";
  }
  return "?";
}

double martingale_bound(MartingaleKind kind, double alpha, double B, double T) {
  require(alpha > 0.0 && B > 0.0 && T > 0.0,
          "alpha, B and T must be positive");
  const double gauss = std::exp(-alpha * alpha / (2.0 * B));
  switch (kind) {
    case MartingaleKind::kA:
      return std::exp(-alpha);
    case MartingaleKind::kB:
      return gauss;
    case MartingaleKind::kC:
      return 2.0 * gauss;
    case MartingaleKind::kD:
      // <M>_T = T is deterministic, so P(<M>_T > B) is 0 or 1.
      return std::max(2.0 * gauss, T > B ? 1.0 : 0.0);
  }
  return 1.0;
}

MartingaleReport martingale_bound_check(MartingaleKind kind, double alpha,
                                        double B, double T, double dt,
                                        std::uint64_t n, std::uint64_t seed,
                                        std::size_t workers) {
  require(n >= 1, "n must be positive");
  require(dt > 0.0 && dt <= T, "dt must lie in (0, T]");
  const double ratio = T / dt;
  require(std::abs(ratio - std::round(ratio)) <= 1e-9 * std::max(1.0, ratio),
          "T/dt must be an integer");
  const auto steps = static_cast<std::uint32_t>(std::llround(ratio));

  MartingaleReport report;
  report.kind = kind;
  report.alpha = alpha;
  report.B = B;
  report.T = T;
  report.dt = dt;
  report.n = n;
  report.bound = martingale_bound(kind, alpha, B, T);

  const bool variance_ok = T <= B;  // <M>_T = T
  const double sqrt_dt = std::sqrt(dt);
  const CounterRng rng(seed);
  std::vector<std::uint8_t> event(n, 0);
  parallel_for(n, workers, [&](std::size_t i) {
    const auto path = static_cast<std::uint32_t>(i);
    double m = 0.0;
    bool hit = false;
    const bool tracks_sup =
        kind == MartingaleKind::kC || kind == MartingaleKind::kD;
    // Items (b) and (c) intersect with {<M>_T <= B}, empty when T > B.
    if ((kind == MartingaleKind::kB || kind == MartingaleKind::kC) &&
        !variance_ok)
      return;
    for (std::uint32_t k = 0; k < steps; k += 2) {
      const auto z = rng.normal_pair(Stream::kMartingale, path, k / 2, 0);
      m += sqrt_dt * z[0];
      if (tracks_sup && std::abs(m) >= alpha) {
        hit = true;
        break;
      }
      if (k + 1 < steps) {
        m += sqrt_dt * z[1];
        if (tracks_sup && std::abs(m) >= alpha) {
          hit = true;
          break;
        }
      }
    }
    if (kind == MartingaleKind::kA) hit = m - 0.5 * T >= alpha;
    if (kind == MartingaleKind::kB) hit = m >= alpha;
    event[i] = hit ? 1 : 0;
  });

  for (auto e : event) report.hits += e;
  report.frequency =
      static_cast<double>(report.hits) / static_cast<double>(n);
  report.std_error = binomial_std_error(report.hits, n);
  report.pass = report.frequency <= report.bound + 3.0 * report.std_error;
  return report;
}

}  // namespace ldp
