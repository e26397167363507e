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

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "ldp/common.hpp"
#include "ldp/model.hpp"
#include "ldp/path.hpp"
#include "ldp/rng.hpp"

namespace ldp {

enum class Scheme { kTamed, kPlain };

std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

struct SimConfig {
  double epsilon = 0.1;
  double T = 1.0;
  double dt = 1e-3;
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::kTamed;

  /// Number of grid steps; throws std::invalid_argument if T/dt is not an
  /// integer within 1e-9 or dt > T.
  std::size_t n_steps() const;
  void validate() const;
};

/// One explicit Euler-Maruyama step with preallocated scratch space.
///
/// Tamed: x += dt b(x) / (1 + dt |b(x)|) + eps sigma(x) dB.
/// Plain: x += dt b(x) + eps sigma(x) dB.
class EulerStepper {
 public:
  EulerStepper(const DiffusionModel& model, const SimConfig& cfg);

  /// Advances x by one step. `normals` holds N(0,1) draws for dB / sqrt(dt);
  /// `extra` (may be empty) is added verbatim to the increment.
  void step(Vec& x, const Vec& normals, const Vec* extra = nullptr);

 private:
  const DiffusionModel& model_;
  double dt_;
  double sqrt_dt_;
  double epsilon_;
  bool tamed_;
  Vec drift_;
  Mat sigma_;
  Vec noise_;
};

/// Runs one path of the SDE, calling visit(k, x) at every grid node k
/// (starting with k = 0 at x0). Stops early when visit returns false.
/// Throws DivergenceError on a non-finite state.
template <typename Visit>
void run_path(const DiffusionModel& model, const SimConfig& cfg,
              std::uint32_t path_index, Visit&& visit) {
  const std::size_t n = cfg.n_steps();
  const CounterRng rng(cfg.seed);
  EulerStepper stepper(model, cfg);
  Vec x = model.x0();
  Vec z(static_cast<Eigen::Index>(model.dim()));
  if (!visit(std::size_t{0}, static_cast<const Vec&>(x))) return;
  for (std::size_t k = 0; k < n; ++k) {
    rng.fill_normals(Stream::kBrownian, path_index,
                     static_cast<std::uint32_t>(k), z);
    stepper.step(x, z);
    if (!x.allFinite())
      throw DivergenceError(k + 1, "simulation diverged at step " +
                                       std::to_string(k + 1));
    if (!visit(k + 1, static_cast<const Vec&>(x))) return;
  }
}

/// Runs the base process and its beta-perturbed twin on the same dB stream;
/// the twin additionally receives eps sqrt(beta) dW from a disjoint stream.
/// visit(k, base, perturbed) is called at every grid node.
template <typename Visit>
void run_coupled(const DiffusionModel& model, const SimConfig& cfg,
                 double beta, std::uint32_t path_index, Visit&& visit) {
  require(beta >= 0.0, "beta must be nonnegative");
  const std::size_t n = cfg.n_steps();
  const CounterRng rng(cfg.seed);
  EulerStepper base_stepper(model, cfg);
  EulerStepper pert_stepper(model, cfg);
  const auto d = static_cast<Eigen::Index>(model.dim());
  Vec base = model.x0();
  Vec pert = model.x0();
  Vec z(d), w(d);
  const double w_scale = cfg.epsilon * std::sqrt(beta) * std::sqrt(cfg.dt);
  if (!visit(std::size_t{0}, static_cast<const Vec&>(base),
             static_cast<const Vec&>(pert)))
    return;
  for (std::size_t k = 0; k < n; ++k) {
    const auto step = static_cast<std::uint32_t>(k);
    rng.fill_normals(Stream::kBrownian, path_index, step, z);
    base_stepper.step(base, z);
    if (beta > 0.0) {
      rng.fill_normals(Stream::kPerturbation, path_index, step, w);
      w *= w_scale;
      pert_stepper.step(pert, z, &w);
    } else {
      pert_stepper.step(pert, z);
    }
    if (!base.allFinite() || !pert.allFinite())
      throw DivergenceError(k + 1, "coupled simulation diverged at step " +
                                       std::to_string(k + 1));
    if (!visit(k + 1, static_cast<const Vec&>(base),
               static_cast<const Vec&>(pert)))
      return;
  }
}

/// Full path of the SDE for the given path index.
Path simulate(const DiffusionModel& model, const SimConfig& cfg,
              std::uint32_t path_index = 0);

struct CoupledPaths {
  Path base;
  Path perturbed;
  double beta = 0.0;
  /// max_k |perturbed_k - base_k| over nodes up to and including the first
  /// node where either norm reaches the cap C (all nodes without a cap).
  double sup_deviation = 0.0;
};

CoupledPaths simulate_perturbed(
    const DiffusionModel& model, const SimConfig& cfg, double beta,
    double cap = std::numeric_limits<double>::infinity(),
    std::uint32_t path_index = 0);

/// Sup deviation of a coupled pair computed without storing the paths.
double coupled_sup_deviation(const DiffusionModel& model, const SimConfig& cfg,
                             double beta, double cap,
                             std::uint32_t path_index);

/// First grid time with |u_k| >= C, or +inf if the path never reaches C.
ExtendedReal first_exit_time(const Path& path, double C);

}  // namespace ldp
