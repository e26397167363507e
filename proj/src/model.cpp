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

#include "ldp/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ldp/rng.hpp"

namespace ldp {

namespace {

std::string format_point(const Vec& x) {
  std::ostringstream os;
  os.precision(17);
  os << "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

Verdict upgrade(Verdict v, bool analytic) {
  return (analytic && v == Verdict::kInconclusivePass) ? Verdict::kPass : v;
}

}  // namespace

DiffusionModel::DiffusionModel(std::size_t dim, Vec x0, DriftFn drift,
                               DiffusionFn diffusion, std::string label)
    : dim_(dim),
      x0_(std::move(x0)),
      drift_(std::move(drift)),
      diffusion_(std::move(diffusion)),
      label_(std::move(label)) {
  require(dim_ > 0, "model dimension must be positive");
  require(static_cast<std::size_t>(x0_.size()) == dim_,
          "x0 length must equal model dimension");
  require(static_cast<bool>(drift_) && static_cast<bool>(diffusion_),
          "model evaluators must be set");
}

Vec DiffusionModel::drift(const Vec& x) const {
  Vec out(dim_);
  drift_(x, out);
  return out;
}

Mat DiffusionModel::diffusion(const Vec& x) const {
  Mat out(dim_, dim_);
  diffusion_(x, out);
  return out;
}

DiffusionModel DiffusionModel::with_x0(Vec x0) const {
  return DiffusionModel(dim_, std::move(x0), drift_, diffusion_, label_);
}

Vec checked_drift(const DiffusionModel& model, const Vec& x) {
  require(static_cast<std::size_t>(x.size()) == model.dim(),
          "point dimension does not match model dimension");
  Vec out;
  try {
    out = model.drift(x);
  } catch (const std::exception& e) {
    throw EvaluationError(x, "drift evaluation failed at " + format_point(x) +
                                 ": " + e.what());
  }
  if (!out.allFinite())
    throw EvaluationError(x, "drift is not finite at " + format_point(x));
  return out;
}

Mat checked_diffusion(const DiffusionModel& model, const Vec& x) {
  require(static_cast<std::size_t>(x.size()) == model.dim(),
          "point dimension does not match model dimension");
  Mat out;
  try {
    out = model.diffusion(x);
  } catch (const std::exception& e) {
    throw EvaluationError(x, "diffusion evaluation failed at " +
                                 format_point(x) + ": " + e.what());
  }
  if (!out.allFinite())
    throw EvaluationError(x, "diffusion is not finite at " + format_point(x));
  return out;
}

Mat eval_a(const DiffusionModel& model, const Vec& x) {
  const Mat s = checked_diffusion(model, x);
  Mat a = s * s.transpose();
  // Exact symmetry; the product is symmetric only up to rounding otherwise.
  return 0.5 * (a + a.transpose());
}

DiffusionModel make_linear_model(Mat drift_matrix, Vec drift_offset,
                                 Mat diffusion_matrix, Vec x0) {
  const auto d = x0.size();
  require(drift_matrix.rows() == d && drift_matrix.cols() == d,
          "linear model: drift_matrix must be dim x dim");
  require(drift_offset.size() == d,
          "linear model: drift_offset must have length dim");
  require(diffusion_matrix.rows() == d && diffusion_matrix.cols() == d,
          "linear model: diffusion_matrix must be dim x dim");
  auto drift = [A = std::move(drift_matrix), c = std::move(drift_offset)](
                   const Eigen::Ref<const Vec>& x, Eigen::Ref<Vec> out) {
    out.noalias() = A * x;
    out += c;
  };
  auto diffusion = [S = std::move(diffusion_matrix)](
                       const Eigen::Ref<const Vec>&, Eigen::Ref<Mat> out) {
    out = S;
  };
  return DiffusionModel(static_cast<std::size_t>(d), std::move(x0),
                        std::move(drift), std::move(diffusion), "linear");
}

DiffusionModel make_cubic_example(double x0) {
  auto drift = [](const Eigen::Ref<const Vec>& x, Eigen::Ref<Vec> out) {
    out[0] = -x[0] * x[0] * x[0];
  };
  auto diffusion = [](const Eigen::Ref<const Vec>& x, Eigen::Ref<Mat> out) {
    const double r = std::abs(x[0]);
    out(0, 0) = r * std::sqrt(r);
  };
  return DiffusionModel(1, Vec::Constant(1, x0), drift, diffusion,
                        "cubic_example");
}

DiffusionModel make_gradient_polynomial(std::vector<double> coefficients,
                                        double sigma_scale, double sigma_power,
                                        Vec x0) {
  require(!coefficients.empty(),
          "gradient_polynomial: at least one coefficient is required");
  const auto d = static_cast<std::size_t>(x0.size());
  auto drift = [c = std::move(coefficients)](const Eigen::Ref<const Vec>& x,
                                             Eigen::Ref<Vec> out) {
    const double r2 = x.squaredNorm();
    double factor = 0.0;
    double power = 1.0;  // |x|^{2k-2}
    for (double ck : c) {
      factor += ck * power;
      power *= r2;
    }
    out = -factor * x;
  };
  auto diffusion = [sigma_scale, sigma_power](const Eigen::Ref<const Vec>& x,
                                              Eigen::Ref<Mat> out) {
    const double s =
        sigma_scale * std::pow(1.0 + x.squaredNorm(), 0.5 * sigma_power);
    out.setZero();
    out.diagonal().setConstant(s);
  };
  return DiffusionModel(d, std::move(x0), drift, diffusion,
                        "gradient_polynomial");
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kPass:
      return "pass";
    case Verdict::kInconclusivePass:
      return "inconclusive-pass";
    case Verdict::kInconclusive:
      return "inconclusive";
    case Verdict::kFail:
      return "fail";
  }
  return "unknown";
}

double inward_ratio(const DiffusionModel& model, const Vec& x) {
  const double norm = x.norm();
  if (norm == 0.0) return 0.0;
  return x.dot(checked_drift(model, x)) / norm;
}

double balance_ratio(const DiffusionModel& model, const Vec& x) {
  const double num = std::max(0.0, x.dot(eval_a(model, x) * x));
  const double den = x.norm() * std::abs(x.dot(checked_drift(model, x)));
  if (num == 0.0) return 0.0;  // 0/0 = 0 and 0/positive = 0
  if (den == 0.0) return std::numeric_limits<double>::infinity();
  return num / den;
}

std::vector<Vec> shell_probes(std::size_t dim, double radius, int count,
                              std::uint64_t seed, std::uint32_t shell_index) {
  const CounterRng rng(seed);
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(count));
  Vec z(dim);
  for (int j = 0; j < count; ++j) {
    do {
      rng.fill_normals(Stream::kProbe, shell_index,
                       static_cast<std::uint32_t>(j), z);
    } while (z.norm() == 0.0);
    out.push_back(radius * z / z.norm());
  }
  return out;
}

namespace {

void validate_radii(const std::vector<double>& radii, int probes) {
  require(!radii.empty(), "radii must be nonempty");
  require(probes >= 1, "probes_per_shell must be >= 1");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    require(radii[i] > 0.0, "radii must be positive");
    if (i > 0) require(radii[i] > radii[i - 1], "radii must be increasing");
  }
}

}  // namespace

InwardDriftScan check_inward_drift(const DiffusionModel& model,
                                   const std::vector<double>& radii,
                                   int probes_per_shell, std::uint64_t seed,
                                   bool analytic) {
  validate_radii(radii, probes_per_shell);
  InwardDriftScan scan;
  scan.radii = radii;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    double psi = -std::numeric_limits<double>::infinity();
    for (const Vec& x : shell_probes(model.dim(), radii[i], probes_per_shell,
                                     seed, static_cast<std::uint32_t>(i))) {
      psi = std::max(psi, inward_ratio(model, x));
    }
    scan.inward_values.push_back(psi);
  }

  const auto& v = scan.inward_values;
  const bool decreasing =
      std::adjacent_find(v.begin(), v.end(), std::less_equal<>{}) == v.end();
  const double margin = std::min(-1.0, 2.0 * v.front());
  if (decreasing && v.size() > 1 && v.back() <= margin) {
    scan.verdict = upgrade(Verdict::kInconclusivePass, analytic);
  } else if (v.back() >= 0.0 && v.back() >= v.front()) {
    scan.verdict = Verdict::kFail;
  } else {
    scan.verdict = Verdict::kInconclusive;
  }
  return scan;
}

BalanceScan check_balance(const DiffusionModel& model,
                          const std::vector<double>& radii,
                          int probes_per_shell, double L, std::uint64_t seed,
                          bool analytic) {
  validate_radii(radii, probes_per_shell);
  require(L > 0.0, "L must be positive");
  BalanceScan scan;
  scan.radii = radii;
  scan.L_used = L;
  bool saw_outer_shell = false;
  bool infinite_outer = false;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    double worst = 0.0;
    for (const Vec& x : shell_probes(model.dim(), radii[i], probes_per_shell,
                                     seed, static_cast<std::uint32_t>(i))) {
      const double ratio = balance_ratio(model, x);
      if (std::isinf(ratio) && !scan.offending_point && radii[i] > L)
        scan.offending_point = x;
      worst = std::max(worst, ratio);
    }
    scan.balance_values.push_back(worst);
    if (radii[i] > L) {
      if (!saw_outer_shell) scan.K_estimate = worst;
      scan.K_estimate = std::max(scan.K_estimate, worst);
      saw_outer_shell = true;
      infinite_outer = infinite_outer || std::isinf(worst);
    }
  }

  if (infinite_outer) {
    scan.verdict = Verdict::kFail;
  } else if (!saw_outer_shell) {
    scan.verdict = Verdict::kInconclusive;
  } else {
    // Growth across the outer shells is evidence that no finite K exists.
    const auto first_outer = std::find_if(
        radii.begin(), radii.end(), [L](double r) { return r > L; });
    const double first_value =
        scan.balance_values[static_cast<std::size_t>(first_outer - radii.begin())];
    const double last_value = scan.balance_values.back();
    const bool growing = radii.end() - first_outer > 1 &&
                         last_value > 2.0 * first_value && last_value > 0.0;
    scan.verdict = growing ? Verdict::kInconclusive
                           : upgrade(Verdict::kInconclusivePass, analytic);
  }
  return scan;
}

double check_local_lipschitz(const DiffusionModel& model, double ball_radius,
                             int pair_samples, std::uint64_t seed) {
  require(ball_radius > 0.0, "ball_radius must be positive");
  require(pair_samples >= 2, "pair_samples must be >= 2");
  const CounterRng rng(seed);
  const std::size_t d = model.dim();
  // Counter domain distinct from the shell scans.
  constexpr std::uint32_t kLipschitzDomain = 0x40000000u;
  constexpr std::uint32_t kRadiusBlock = 0x1000u;
  auto sample = [&](std::uint32_t index) {
    Vec z(d);
    do {
      rng.fill_normals(Stream::kProbe, kLipschitzDomain, index, z);
    } while (z.norm() == 0.0);
    const double u = rng.uniform_pair(Stream::kProbe, kLipschitzDomain, index,
                                      kRadiusBlock)[0];
    return Vec(ball_radius * std::pow(u, 1.0 / static_cast<double>(d)) * z /
               z.norm());
  };

  double estimate = 0.0;
  for (int p = 0; p < pair_samples; ++p) {
    const Vec x = sample(2u * static_cast<std::uint32_t>(p));
    const Vec y = sample(2u * static_cast<std::uint32_t>(p) + 1u);
    const double dist = (x - y).norm();
    if (dist == 0.0) continue;
    const double num =
        (checked_drift(model, x) - checked_drift(model, y)).norm() +
        (checked_diffusion(model, x) - checked_diffusion(model, y)).norm();
    estimate = std::max(estimate, num / dist);
  }
  return estimate;
}

HypothesisReport check_hypotheses(const DiffusionModel& model,
                                  const HypothesisOptions& options) {
  const auto inward = check_inward_drift(model, options.radii,
                                         options.probes_per_shell, options.seed,
                                         options.assert_h2);
  const auto balance =
      check_balance(model, options.radii, options.probes_per_shell, options.L,
                    options.seed, options.assert_h3);
  HypothesisReport report;
  report.radii = options.radii;
  report.inward_values = inward.inward_values;
  report.balance_values = balance.balance_values;
  report.lipschitz_estimate = check_local_lipschitz(
      model, options.lipschitz_ball, options.pair_samples, options.seed);
  report.h1 = std::isfinite(report.lipschitz_estimate)
                  ? upgrade(Verdict::kInconclusivePass, options.assert_h1)
                  : Verdict::kFail;
  report.h2 = inward.verdict;
  report.h3 = balance.verdict;
  report.K_estimate = balance.K_estimate;
  report.L_used = balance.L_used;
  report.h3_offending_point = balance.offending_point;
  return report;
}

}  // namespace ldp
