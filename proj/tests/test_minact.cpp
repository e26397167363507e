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

#include <doctest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "ldp/minact.hpp"
#include "test_support.hpp"

using namespace ldp;

namespace {

// Central differences of J_beta itself, node by node.
Mat fd_gradient(const DiffusionModel& model, const Path& path, double beta,
                double h = 1e-6) {
  Mat g = Mat::Zero(path.dim(), path.states.cols());
  for (Eigen::Index k = 1; k + 1 < path.states.cols(); ++k) {
    for (Eigen::Index i = 0; i < path.states.rows(); ++i) {
      Path plus = path, minus = path;
      plus.states(i, k) += h;
      minus.states(i, k) -= h;
      g(i, k) = (rate_functional_regularized(model, plus, beta) -
                 rate_functional_regularized(model, minus, beta)) /
                (2 * h);
    }
  }
  return g;
}

double closed_form_ou(double T) {
  return (std::exp(2 * T) - 1) / std::pow(std::exp(T) - std::exp(-T), 2);
}

}  // namespace

TEST_CASE("action_gradient matches finite differences") {
  std::mt19937_64 gen(21);
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<int> dim_dist(1, 3), n_dist(4, 32);
  std::uniform_real_distribution<double> unif(0.2, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = dim_dist(gen);
    const auto n = static_cast<std::size_t>(n_dist(gen));
    DiffusionModel model = [&]() {
      if (trial % 2 == 0) {
        Mat A(d, d), S(d, d);
        for (int i = 0; i < d * d; ++i) {
          A.data()[i] = normal(gen);
          S.data()[i] = 0.5 * normal(gen);
        }
        // Rank-deficient diffusion on a third of the linear cases.
        if (trial % 3 == 0 && d > 1) S.col(0).setZero();
        return make_linear_model(A, Vec::Zero(d), S, Vec::Zero(d));
      }
      return make_gradient_polynomial({unif(gen), unif(gen)}, unif(gen), 1.0,
                                      Vec::Zero(d));
    }();
    Mat states(d, static_cast<Eigen::Index>(n + 1));
    for (Eigen::Index i = 0; i < states.size(); ++i)
      states.data()[i] = 0.5 * normal(gen);
    states.col(0) = model.x0();
    const Path path(unif(gen) + 0.5, states);
    const double beta = trial % 4 == 0 ? 1e-2 : 0.5;
    const Mat g = action_gradient(model, path, beta);
    const Mat oracle = fd_gradient(model, path, beta);
    INFO("trial " << trial << " d=" << d << " n=" << n);
    CHECK((g - oracle).norm() <= 1e-5 * oracle.norm());
    CHECK(g.col(0).isZero(0.0));
    CHECK(g.col(g.cols() - 1).isZero(0.0));
  }
}

TEST_CASE("action_gradient examples") {
  SUBCASE("flow path of the OU model") {
    const auto model = testing::scalar_ou(1.0);
    const Path flow = flow_path(model, 1.0, 200);
    CHECK(action_gradient(model, flow, 1.0).norm() <= 1e-4);
  }
  SUBCASE("equilibrium") {
    const auto model = make_cubic_example(0.0);
    const Path rest = straight_path(Vec::Zero(1), Vec::Zero(1), 1.0, 20);
    CHECK(action_gradient(model, rest, 1.0).norm() <= 1e-8);
  }
  SUBCASE("beta must be positive") {
    const auto model = testing::scalar_ou();
    const Path p = straight_path(Vec::Zero(1), Vec::Ones(1), 1.0, 10);
    CHECK_THROWS_AS(action_gradient(model, p, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(action_gradient(model, p, -1.0), std::invalid_argument);
  }
}

TEST_CASE("minimize_action against the closed form") {
  const auto model = testing::scalar_ou(0.0);
  SUBCASE("T = 2") {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = minimize_action({model, Vec::Ones(1), 2.0, 400, 0.0, 20000,
                                    1e-8, std::nullopt});
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    REQUIRE(r.value.is_finite());
    CHECK(std::abs(r.value.value - closed_form_ou(2.0)) <= 0.01 * closed_form_ou(2.0));
    CHECK(closed_form_ou(2.0) == doctest::Approx(1.018657).epsilon(1e-6));
    CHECK(secs < 30.0);
    MESSAGE("T=2 value " << r.value.value << " iters " << r.iterations
                         << " grad " << r.grad_norm << " time " << secs << "s");
  }
  SUBCASE("T = 8") {
    const auto r = minimize_action({model, Vec::Ones(1), 8.0, 400, 0.0, 20000,
                                    1e-8, std::nullopt});
    CHECK(std::abs(r.value.value - 1.0) <= 0.05);
  }
}

TEST_CASE("minimize_action properties") {
  SUBCASE("flow endpoint target has near-zero action") {
    const auto model = testing::scalar_ou(1.0);
    const Path flow = flow_path(model, 1.0, 100);
    const Vec end = flow.state(flow.n_steps());
    const auto r = minimize_action({model, end, 1.0, 100, 0.0, 20000, 1e-8,
                                    std::nullopt});
    CHECK(r.value.value <= 1e-3);
  }
  SUBCASE("pinning, straight-line bound and invariant") {
    Mat S = Mat::Identity(2, 2);
    S(1, 1) = 0.3;
    const auto model = make_linear_model(-Mat::Identity(2, 2), Vec::Zero(2), S,
                                         Vec::Zero(2));
    Vec end(2);
    end << 1.0, 0.5;
    const MinActionProblem problem{model, end, 1.5, 60, 0.01, 20000, 1e-8,
                                   std::nullopt};
    const auto r = minimize_action(problem);
    CHECK((r.path.state(0) - model.x0()).norm() == 0.0);
    CHECK((r.path.state(r.path.n_steps()) - end).norm() == 0.0);
    const double straight = rate_functional_regularized(
        model, straight_path(model.x0(), end, 1.5, 60), 0.01);
    CHECK(r.value.value <= straight);
    CHECK(r.beta_used == 0.01);
    CHECK(std::abs(r.regularized_value -
                   rate_functional_regularized(model, r.path, 0.01)) <= 1e-12);
  }
  SUBCASE("monotone descent from a warm start") {
    // Each extra iteration budget can only lower the value.
    const auto model = make_gradient_polynomial({1.0, 0.5}, 1.0, 0.5, Vec::Zero(1));
    double previous = std::numeric_limits<double>::infinity();
    for (int iters : {1, 2, 5, 20, 100}) {
      const auto r = minimize_action({model, Vec::Ones(1), 1.0, 40, 0.0, iters,
                                      1e-12, std::nullopt});
      CHECK(r.regularized_value <= previous);
      previous = r.regularized_value;
    }
  }
  SUBCASE("warm start is used") {
    const auto model = testing::scalar_ou(0.0);
    const auto cold = minimize_action({model, Vec::Ones(1), 2.0, 100, 0.0, 20000,
                                       1e-8, std::nullopt});
    const auto warm = minimize_action({model, Vec::Ones(1), 2.0, 100, 0.0, 20000,
                                       1e-8, cold.path});
    CHECK(warm.iterations <= cold.iterations);
    CHECK(warm.value.value == doctest::Approx(cold.value.value).epsilon(1e-6));
  }
  SUBCASE("invalid problems") {
    const auto model = testing::scalar_ou(0.0);
    CHECK_THROWS_AS(minimize_action({model, Vec::Ones(1), 1.0, 3, 0.0, 100, 1e-8,
                                     std::nullopt}),
                    std::invalid_argument);
    CHECK_THROWS_AS(minimize_action({model, Vec::Ones(2), 1.0, 10, 0.0, 100, 1e-8,
                                     std::nullopt}),
                    std::invalid_argument);
    CHECK_THROWS_AS(minimize_action({model, Vec::Ones(1), 1.0, 10, -1.0, 100,
                                     1e-8, std::nullopt}),
                    std::invalid_argument);
  }
}
