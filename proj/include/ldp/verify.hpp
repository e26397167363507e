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
#include <optional>
#include <string>
#include <vector>

#include "ldp/common.hpp"
#include "ldp/model.hpp"

namespace ldp {

// Lyapunov function V(x) = c |x|^2 / (1 + |x|).

double lyapunov_V(const Vec& x, double c);

/// r(x) = (2 + |x|) |x| / (1 + |x|)^2, so that grad V = c r(x) x / |x|.
double lyapunov_r(const Vec& x);

/// c r(x) x / |x|; zero at the origin.
Vec lyapunov_grad(const Vec& x, double c);

/// DV(x) = <grad V, b> + 1/2 <grad V, a grad V>. No Hessian-trace term.
double dv_operator(const DiffusionModel& model, const Vec& x, double c);

/// -1/2 c r(x) |<x, b(x)>| / |x|, the upper bound for DV(x) when |x| > L and
/// c <= 1/K.
double dv_upper_bound(const DiffusionModel& model, const Vec& x, double c);

struct LyapunovScan {
  double c = 1.0;
  double L = 1.0;
  std::vector<double> radii;
  std::vector<double> max_DV;
  std::vector<double> bound_values;  // bound at the probe attaining max_DV
  /// Probes with |x| > L where DV(x) exceeds the bound (beyond slack).
  std::size_t chain_violations = 0;
  Verdict verdict = Verdict::kInconclusive;
  std::optional<std::string> warning;
};

/// Shell scan of DV. Pass requires max_DV <= 0 on every shell beyond L and
/// DV <= bound at every probe there. If `K_estimate` is given and c > 1/K,
/// a warning is recorded (the bound is not guaranteed then).
LyapunovScan lyapunov_scan(const DiffusionModel& model, double c, double L,
                           const std::vector<double>& radii, int probes,
                           std::uint64_t seed,
                           std::optional<double> K_estimate = std::nullopt,
                           double slack = 1e-10);

/// Number of points where DV(x) <= bound(x) <= 0 fails beyond `slack`
/// (relative to max(1, |bound|)).
std::size_t lyapunov_chain_violations(const DiffusionModel& model, double c,
                                      const std::vector<Vec>& points,
                                      double slack = 1e-10);

// Exponential inequalities for continuous martingales, checked on a
// discretized standard Brownian motion M (so <M>_t = t).

enum class MartingaleKind { kA, kB, kC, kD };

MartingaleKind martingale_kind_from_string(const std::string& s);
std::string to_string(MartingaleKind k);

struct MartingaleReport {
  MartingaleKind kind = MartingaleKind::kC;
  double alpha = 0.0;
  double B = 0.0;
  double T = 0.0;
  double dt = 0.0;
  std::uint64_t n = 0;
  std::uint64_t hits = 0;
  double frequency = 0.0;
  double bound = 0.0;
  double std_error = 0.0;
  bool pass = false;
};

/// The bound for each item:
///  (a) {M_T - <M>_T / 2 >= alpha}:            e^{-alpha}
///  (b) {M_T >= alpha, <M>_T <= B}:             e^{-alpha^2 / 2B}
///  (c) {sup|M| >= alpha, <M>_T <= B}:          2 e^{-alpha^2 / 2B}
///  (d) {sup|M| >= alpha}:  max(2 e^{-alpha^2 / 2B}, P(<M>_T > B))
double martingale_bound(MartingaleKind kind, double alpha, double B, double T);

/// Empirical frequency of the item's event over n discretized paths;
/// pass = frequency <= bound + 3 binomial standard errors.
MartingaleReport martingale_bound_check(MartingaleKind kind, double alpha,
                                        double B, double T, double dt,
                                        std::uint64_t n, std::uint64_t seed,
                                        std::size_t workers = 1);

}  // namespace ldp
