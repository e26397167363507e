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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ldp/common.hpp"

namespace ldp {

using DriftFn = std::function<void(const Eigen::Ref<const Vec>&, Eigen::Ref<Vec>)>;
using DiffusionFn =
    std::function<void(const Eigen::Ref<const Vec>&, Eigen::Ref<Mat>)>;

/// Raised when a drift or diffusion evaluator fails or returns non-finite
/// output; carries the offending point.
class EvaluationError : public NumericError {
 public:
  EvaluationError(Vec point, const std::string& what)
      : NumericError(what), point_(std::move(point)) {}
  const Vec& point() const noexcept { return point_; }

 private:
  Vec point_;
};

/// dX = b(X) dt + eps * sigma(X) dB, X_0 = x0.
///
/// Evaluators write into caller-provided storage so that simulation loops
/// run without allocation. They must be deterministic.
class DiffusionModel {
 public:
  DiffusionModel(std::size_t dim, Vec x0, DriftFn drift, DiffusionFn diffusion,
                 std::string label);

  std::size_t dim() const { return dim_; }
  const Vec& x0() const { return x0_; }
  const std::string& label() const { return label_; }

  void drift(const Eigen::Ref<const Vec>& x, Eigen::Ref<Vec> out) const {
    drift_(x, out);
  }
  void diffusion(const Eigen::Ref<const Vec>& x, Eigen::Ref<Mat> out) const {
    diffusion_(x, out);
  }
  Vec drift(const Vec& x) const;
  Mat diffusion(const Vec& x) const;

  /// Same coefficients, different starting point.
  DiffusionModel with_x0(Vec x0) const;

 private:
  std::size_t dim_;
  Vec x0_;
  DriftFn drift_;
  DiffusionFn diffusion_;
  std::string label_;
};

/// a(x) = sigma(x) sigma(x)^T.
Mat eval_a(const DiffusionModel& model, const Vec& x);

/// Drift evaluation that checks the dimension and finiteness of the result.
Vec checked_drift(const DiffusionModel& model, const Vec& x);
Mat checked_diffusion(const DiffusionModel& model, const Vec& x);

// Built-in families.

/// b(x) = A x + offset, sigma(x) = S (constant).
DiffusionModel make_linear_model(Mat drift_matrix, Vec drift_offset,
                                 Mat diffusion_matrix, Vec x0);

/// Scalar b(x) = -x^3, sigma(x) = |x|^{3/2}.
DiffusionModel make_cubic_example(double x0);

/// Gradient flow of U(x) = sum_k c_k |x|^{2k} / (2k) for k = 1..K, so
/// b(x) = -sum_k c_k |x|^{2k-2} x, with sigma(x) = s (1 + |x|^2)^{p/2} I.
DiffusionModel make_gradient_polynomial(std::vector<double> coefficients,
                                        double sigma_scale, double sigma_power,
                                        Vec x0);

// Hypothesis probing.

enum class Verdict { kPass, kInconclusivePass, kInconclusive, kFail };

std::string to_string(Verdict v);

struct InwardDriftScan {
  std::vector<double> radii;
  /// psi(R): max over probes on the shell |x| = R of <x, b(x)> / |x|.
  std::vector<double> inward_values;
  Verdict verdict = Verdict::kInconclusive;
};

struct BalanceScan {
  std::vector<double> radii;
  /// Per-shell max of <x, a(x) x> / (|x| |<x, b(x)>|), 0/0 = 0; may be +inf.
  std::vector<double> balance_values;
  double K_estimate = 0.0;
  double L_used = 0.0;
  Verdict verdict = Verdict::kInconclusive;
  std::optional<Vec> offending_point;
};

struct HypothesisOptions {
  std::vector<double> radii{2.0, 4.0, 8.0, 16.0, 32.0};
  int probes_per_shell = 64;
  double L = 1.0;
  double lipschitz_ball = 2.0;
  int pair_samples = 1000;
  std::uint64_t seed = 0;
  /// Analytic assertions supplied by the user upgrade inconclusive-pass to pass.
  bool assert_h1 = false;
  bool assert_h2 = false;
  bool assert_h3 = false;
};

struct HypothesisReport {
  std::vector<double> radii;
  std::vector<double> inward_values;
  std::vector<double> balance_values;
  double lipschitz_estimate = 0.0;
  Verdict h1 = Verdict::kInconclusive;
  Verdict h2 = Verdict::kInconclusive;
  Verdict h3 = Verdict::kInconclusive;
  double K_estimate = 0.0;
  double L_used = 0.0;
  std::optional<Vec> h3_offending_point;

  bool any_fail() const {
    return h1 == Verdict::kFail || h2 == Verdict::kFail || h3 == Verdict::kFail;
  }
};

/// <x, b(x)> / |x| at a single point (0 at the origin).
double inward_ratio(const DiffusionModel& model, const Vec& x);

/// <x, a(x) x> / (|x| |<x, b(x)>|) at a single point with 0/0 = 0; +inf when
/// only the denominator vanishes.
double balance_ratio(const DiffusionModel& model, const Vec& x);

/// Seeded probe points on the sphere of radius `radius` (shell index selects
/// the counter domain).
std::vector<Vec> shell_probes(std::size_t dim, double radius, int count,
                              std::uint64_t seed, std::uint32_t shell_index);

InwardDriftScan check_inward_drift(const DiffusionModel& model,
                                   const std::vector<double>& radii,
                                   int probes_per_shell, std::uint64_t seed,
                                   bool analytic = false);

BalanceScan check_balance(const DiffusionModel& model,
                          const std::vector<double>& radii,
                          int probes_per_shell, double L, std::uint64_t seed,
                          bool analytic = false);

/// Max over seeded pairs in the ball of
/// (|b(x) - b(y)| + |sigma(x) - sigma(y)|_F) / |x - y|.
double check_local_lipschitz(const DiffusionModel& model, double ball_radius,
                             int pair_samples, std::uint64_t seed);

HypothesisReport check_hypotheses(const DiffusionModel& model,
                                  const HypothesisOptions& options);

}  // namespace ldp
