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

#include "ldp/sde.hpp"

#include <algorithm>

namespace ldp {

std::string to_string(Scheme s) {
  return s == Scheme::kTamed ? "tamed" : "plain";
}

Scheme scheme_from_string(const std::string& s) {
  if (s == "tamed") return Scheme::kTamed;
  if (s == "plain") return Scheme::kPlain;
  throw std::invalid_argument("unknown scheme '" + s +
                              "' (expected tamed or plain)");
}

void SimConfig::validate() const {
  require(std::isfinite(epsilon) && epsilon >= 0.0,
          "epsilon must be nonnegative");
  require(std::isfinite(T) && T > 0.0, "T must be positive");
  require(std::isfinite(dt) && dt > 0.0, "dt must be positive");
  require(dt <= T * (1.0 + 1e-12), "dt must not exceed T");
  const double ratio = T / dt;
  require(std::abs(ratio - std::round(ratio)) <= 1e-9 * std::max(1.0, ratio),
          "T/dt must be an integer");
}

std::size_t SimConfig::n_steps() const {
  validate();
  return static_cast<std::size_t>(std::llround(T / dt));
}

EulerStepper::EulerStepper(const DiffusionModel& model, const SimConfig& cfg)
    : model_(model),
      dt_(cfg.dt),
      sqrt_dt_(std::sqrt(cfg.dt)),
      epsilon_(cfg.epsilon),
      tamed_(cfg.scheme == Scheme::kTamed),
      drift_(static_cast<Eigen::Index>(model.dim())),
      sigma_(static_cast<Eigen::Index>(model.dim()),
             static_cast<Eigen::Index>(model.dim())),
      noise_(static_cast<Eigen::Index>(model.dim())) {}

void EulerStepper::step(Vec& x, const Vec& normals, const Vec* extra) {
  model_.drift(x, drift_);
  const double scale = tamed_ ? dt_ / (1.0 + dt_ * drift_.norm()) : dt_;
  if (epsilon_ != 0.0) {
    model_.diffusion(x, sigma_);
    noise_.noalias() = sigma_ * normals;
    x += scale * drift_ + (epsilon_ * sqrt_dt_) * noise_;
  } else {
    x += scale * drift_;
  }
  if (extra) x += *extra;
}

Path simulate(const DiffusionModel& model, const SimConfig& cfg,
              std::uint32_t path_index) {
  const std::size_t n = cfg.n_steps();
  Mat states(static_cast<Eigen::Index>(model.dim()),
             static_cast<Eigen::Index>(n + 1));
  run_path(model, cfg, path_index, [&](std::size_t k, const Vec& x) {
    states.col(static_cast<Eigen::Index>(k)) = x;
    return true;
  });
  return Path(cfg.T, std::move(states));
}

CoupledPaths simulate_perturbed(const DiffusionModel& model,
                                const SimConfig& cfg, double beta, double cap,
                                std::uint32_t path_index) {
  require(cap > 0.0, "cap C must be positive");
  const std::size_t n = cfg.n_steps();
  const auto d = static_cast<Eigen::Index>(model.dim());
  Mat base(d, static_cast<Eigen::Index>(n + 1));
  Mat pert(d, static_cast<Eigen::Index>(n + 1));
  double sup = 0.0;
  bool stopped = false;
  run_coupled(model, cfg, beta, path_index,
              [&](std::size_t k, const Vec& x, const Vec& y) {
                base.col(static_cast<Eigen::Index>(k)) = x;
                pert.col(static_cast<Eigen::Index>(k)) = y;
                if (!stopped) {
                  sup = std::max(sup, (y - x).norm());
                  stopped = x.norm() >= cap || y.norm() >= cap;
                }
                return true;
              });
  CoupledPaths out;
  out.base = Path(cfg.T, std::move(base));
  out.perturbed = Path(cfg.T, std::move(pert));
  out.beta = beta;
  out.sup_deviation = sup;
  return out;
}

double coupled_sup_deviation(const DiffusionModel& model, const SimConfig& cfg,
                             double beta, double cap,
                             std::uint32_t path_index) {
  require(cap > 0.0, "cap C must be positive");
  double sup = 0.0;
  run_coupled(model, cfg, beta, path_index,
              [&](std::size_t, const Vec& x, const Vec& y) {
                sup = std::max(sup, (y - x).norm());
                return x.norm() < cap && y.norm() < cap;
              });
  return sup;
}

ExtendedReal first_exit_time(const Path& path, double C) {
  require(C > 0.0, "C must be positive");
  for (std::size_t k = 0; k <= path.n_steps(); ++k)
    if (path.state(k).norm() >= C) return ExtendedReal::finite(path.time(k));
  return ExtendedReal::infinity();
}

}  // namespace ldp
