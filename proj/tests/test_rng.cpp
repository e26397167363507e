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

#include "ldp/parallel.hpp"
#include "ldp/rng.hpp"

using ldp::CounterRng;
using ldp::Philox4x32;
using ldp::Stream;

TEST_CASE("philox4x32-10 known-answer vectors") {
  // Reference vectors distributed with Random123 (kat_vectors).
  CHECK(Philox4x32::apply({0, 0, 0, 0}, {0, 0}) ==
        Philox4x32::Counter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::apply({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                          {0xffffffff, 0xffffffff}) ==
        Philox4x32::Counter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::apply({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                          {0xa4093822, 0x299f31d0}) ==
        Philox4x32::Counter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("draws are pure functions of (seed, stream, path, step, block)") {
  const CounterRng a(42), b(42), c(43);
  const auto x = a.normal_pair(Stream::kBrownian, 7, 11, 0);
  CHECK(x == b.normal_pair(Stream::kBrownian, 7, 11, 0));
  CHECK(x != c.normal_pair(Stream::kBrownian, 7, 11, 0));
  CHECK(x != a.normal_pair(Stream::kPerturbation, 7, 11, 0));
  CHECK(x != a.normal_pair(Stream::kBrownian, 8, 11, 0));
  CHECK(x != a.normal_pair(Stream::kBrownian, 7, 12, 0));
  CHECK(x != a.normal_pair(Stream::kBrownian, 7, 11, 1));
}

TEST_CASE("normal draws have unit moments") {
  const CounterRng rng(2024);
  const int n = 200000;
  double s1 = 0, s2 = 0, s4 = 0;
  for (int i = 0; i < n / 2; ++i) {
    for (double z : rng.normal_pair(Stream::kBrownian, 0,
                                    static_cast<std::uint32_t>(i), 0)) {
      s1 += z;
      s2 += z * z;
      s4 += z * z * z * z;
    }
  }
  CHECK(std::abs(s1 / n) < 5.0 / std::sqrt(n));
  CHECK(std::abs(s2 / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(s4 / n - 3.0) < 5.0 * std::sqrt(96.0 / n));
}

TEST_CASE("uniforms lie strictly inside (0, 1)") {
  const CounterRng rng(0);
  for (std::uint32_t i = 0; i < 10000; ++i) {
    for (double u : rng.uniform_pair(Stream::kProbe, i, 0, 0)) {
      CHECK(u > 0.0);
      CHECK(u < 1.0);
    }
  }
}

TEST_CASE("parallel_for results do not depend on worker count") {
  const CounterRng rng(5);
  auto compute = [&](std::size_t workers) {
    std::vector<double> out(1000);
    ldp::parallel_for(out.size(), workers, [&](std::size_t i) {
      out[i] = rng.normal_pair(Stream::kBrownian, static_cast<std::uint32_t>(i),
                               0, 0)[0];
    });
    return out;
  };
  const auto one = compute(1);
  CHECK(one == compute(3));
  CHECK(one == compute(8));
}

TEST_CASE("parallel_for rethrows worker exceptions") {
  CHECK_THROWS_AS(ldp::parallel_for(10, 4,
                                    [](std::size_t i) {
                                      if (i == 7) throw std::runtime_error("x");
                                    }),
                  std::runtime_error);
}
