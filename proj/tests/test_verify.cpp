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

#include <cmath>
#include <random>

#include "ldp/verify.hpp"
#include "test_support.hpp"

using namespace ldp;

namespace {

Vec v1(double x) { return Vec::Constant(1, x); }

DiffusionModel linear(double drift, double sigma, std::size_t d = 1) {
  const auto n = static_cast<Eigen::Index>(d);
  return make_linear_model(drift * Mat::Identity(n, n), Vec::Zero(n),
                           sigma * Mat::Identity(n, n), Vec::Zero(n));
}

}  // namespace

TEST_CASE("Lyapunov function and gradient") {
  CHECK(lyapunov_V(Vec::Zero(3), 1.0) == 0.0);
  CHECK(lyapunov_V(v1(2.0), 1.0) == doctest::Approx(4.0 / 3.0));
  CHECK(lyapunov_V(v1(100.0), 0.7) >= 99 * 0.7);
  CHECK(lyapunov_r(v1(2.0)) == doctest::Approx(8.0 / 9.0));
  CHECK(lyapunov_grad(v1(2.0), 1.0)[0] == doctest::Approx(8.0 / 9.0));
  CHECK(lyapunov_grad(Vec::Zero(2), 1.0).isZero(0.0));

  std::mt19937_64 gen(5);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> scale(0.05, 20.0), cdist(0.1, 2.0);
  for (int i = 0; i < 50; ++i) {
    const int d = 1 + i % 4;
    Vec x(d);
    for (int j = 0; j < d; ++j) x[j] = normal(gen);
    x *= scale(gen) / x.norm();
    const double c = cdist(gen);
    const Vec g = lyapunov_grad(x, c);
    Vec fd(d);
    for (int j = 0; j < d; ++j) {
      const double h = 1e-6 * std::max(1.0, x.norm());
      Vec xp = x, xm = x;
      xp[j] += h;
      xm[j] -= h;
      fd[j] = (lyapunov_V(xp, c) - lyapunov_V(xm, c)) / (2 * h);
    }
    CHECK((g - fd).norm() <= 1e-6 * std::max(1.0, fd.norm()));
    CHECK(lyapunov_r(x) <= 1.0 + 1e-12);
  }
}

TEST_CASE("dv_operator examples") {
  CHECK(dv_operator(make_cubic_example(2.0), v1(2.0), 1.0) ==
        doctest::Approx(-320.0 / 81.0).epsilon(1e-12));
  CHECK(dv_operator(linear(-1.0, 0.0), v1(2.0), 1.0) ==
        doctest::Approx(-16.0 / 9.0).epsilon(1e-12));
  std::mt19937_64 gen(6);
  std::normal_distribution<double> normal;
  for (int i = 0; i < 20; ++i) {
    Vec x(3);
    for (int j = 0; j < 3; ++j) x[j] = normal(gen);
    const double r = lyapunov_r(x);
    const double dv = dv_operator(linear(0.0, 1.0, 3), x, 0.8);
    CHECK(dv > 0.0);
    CHECK(dv == doctest::Approx(0.5 * 0.64 * r * r).epsilon(1e-12));
  }
}

TEST_CASE("dv_operator is locally Lipschitz on probe pairs") {
  const auto model = make_cubic_example(0.0);
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> unif(0.1, 5.0);
  for (int i = 0; i < 100; ++i) {
    const double x = unif(gen) * (i % 2 ? 1.0 : -1.0);
    const double dx = 1e-7;
    // Local constant from a derivative bound on [0.1, 5]: |d DV/dx| <= 400.
    CHECK(std::abs(dv_operator(model, v1(x + dx), 1.0) -
                   dv_operator(model, v1(x), 1.0)) <= 400 * dx);
  }
}

TEST_CASE("lyapunov_scan") {
  SUBCASE("cubic example") {
    const auto s = lyapunov_scan(make_cubic_example(0.0), 1.0, 1.0, {2, 4, 8}, 16, 1);
    CHECK(s.verdict != Verdict::kFail);
    CHECK(s.chain_violations == 0);
    for (std::size_t i = 0; i < s.radii.size(); ++i) {
      CHECK(s.max_DV[i] < 0.0);
      CHECK(s.max_DV[i] <= s.bound_values[i] + 1e-10);
    }
    // Scalar oracle: on the shell |x| = R both probes give the same DV.
    const double R = 4.0;
    const double r = (2 + R) * R / ((1 + R) * (1 + R));
    CHECK(s.max_DV[1] == doctest::Approx(-r * R * R * R + 0.5 * r * r * R * R * R)
                             .epsilon(1e-12));
  }
  SUBCASE("outward drift fails") {
    const auto s = lyapunov_scan(linear(1.0, 1.0, 2), 1.0, 1.0, {2, 4}, 16, 2);
    CHECK(s.verdict == Verdict::kFail);
    CHECK(s.max_DV[0] > 0.0);
  }
  SUBCASE("noiseless contraction") {
    const auto s = lyapunov_scan(linear(-1.0, 0.0, 2), 1.0, 1.0, {2, 4, 8}, 16, 3);
    CHECK(s.verdict != Verdict::kFail);
    for (double v : s.max_DV) CHECK(v < 0.0);
  }
  SUBCASE("c above 1/K warns") {
    const auto s = lyapunov_scan(make_cubic_example(0.0), 2.0, 1.0, {2}, 4, 4, 1.0);
    CHECK(s.warning.has_value());
    const auto quiet = lyapunov_scan(make_cubic_example(0.0), 1.0, 1.0, {2}, 4, 4, 1.0);
    CHECK(!quiet.warning.has_value());
  }
}

TEST_CASE("Lyapunov chain on the cubic example") {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> unif(1.01, 50.0);
  std::vector<Vec> points;
  for (int i = 0; i < 1000; ++i) points.push_back(v1(unif(gen) * (i % 2 ? 1 : -1)));
  CHECK(lyapunov_chain_violations(make_cubic_example(0.0), 1.0, points) == 0);
  // The drift-only model violates DV <= bound once the noise dominates.
  const std::vector<Vec> one{v1(2.0)};
  CHECK(lyapunov_chain_violations(linear(0.0, 1.0), 1.0, one) == 1);
}

TEST_CASE("martingale bounds") {
  CHECK(martingale_bound(MartingaleKind::kC, 3.0, 1.0, 1.0) ==
        doctest::Approx(2 * std::exp(-4.5)));
  CHECK(martingale_bound(MartingaleKind::kA, 2.0, 1.0, 1.0) ==
        doctest::Approx(std::exp(-2.0)));
  CHECK(martingale_bound(MartingaleKind::kB, 2.0, 1.0, 1.0) ==
        doctest::Approx(std::exp(-2.0)));
  CHECK(martingale_bound(MartingaleKind::kD, 1.5, 0.5, 1.0) == 1.0);
  CHECK(martingale_kind_from_string("c") == MartingaleKind::kC);
  CHECK(to_string(MartingaleKind::kD) == "d");
  CHECK_THROWS_AS(martingale_kind_from_string("e"), std::invalid_argument);
}

TEST_CASE("martingale_bound_check") {
  SUBCASE("item (c) at alpha = 3 against the reflection series") {
    const double dt = 1e-3;
    const auto rep = martingale_bound_check(MartingaleKind::kC, 3.0, 1.0, 1.0, dt,
                                            20000, 11, 0);
    CHECK(rep.pass);
    const double oracle =
        1.0 - testing::brownian_stay_probability(3.0 + testing::discrete_monitoring_shift(dt), 1.0);
    const double se = std::sqrt(oracle * (1 - oracle) / rep.n);
    CHECK(std::abs(rep.frequency - oracle) <= 4 * se);
    CHECK(rep.bound == doctest::Approx(0.0222179).epsilon(1e-4));
  }
  SUBCASE("vacuous bounds") {
    const auto c = martingale_bound_check(MartingaleKind::kC, 0.1, 1.0, 1.0, 1e-2, 500, 12);
    CHECK(c.bound > 1.0);
    CHECK(c.pass);
    const auto d = martingale_bound_check(MartingaleKind::kD, 1.0, 0.5, 1.0, 1e-2, 500, 12);
    CHECK(d.bound == 1.0);
    CHECK(d.pass);
  }
  SUBCASE("items (a) and (b)") {
    for (auto kind : {MartingaleKind::kA, MartingaleKind::kB}) {
      const auto rep = martingale_bound_check(kind, 1.5, 1.0, 1.0, 1e-2, 5000, 13);
      CHECK(rep.pass);
      CHECK(rep.frequency <= rep.bound);
    }
    // (b) with T > B: <M>_T = T > B so the event is empty.
    const auto empty = martingale_bound_check(MartingaleKind::kB, 0.5, 0.5, 1.0, 1e-2, 500, 13);
    CHECK(empty.hits == 0);
  }
  SUBCASE("worker count does not matter") {
    const auto a = martingale_bound_check(MartingaleKind::kC, 2.0, 1.0, 1.0, 1e-3, 3000, 14, 1);
    const auto b = martingale_bound_check(MartingaleKind::kC, 2.0, 1.0, 1.0, 1e-3, 3000, 14, 3);
    CHECK(a.hits == b.hits);
  }
}
