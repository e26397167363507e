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

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace ldp {

// Philox4x32-10 (Salmon et al., SC'11). Output depends only on (key, counter),
// so any draw can be regenerated independently of scheduling.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter apply(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      ctr = single_round(ctr, key);
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

  static Counter single_round(const Counter& c, const Key& k) {
    const std::uint64_t p0 = std::uint64_t{kMul0} * c[0];
    const std::uint64_t p1 = std::uint64_t{kMul1} * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
};

/// Disjoint counter domains; each stream is an independent family of draws.
enum class Stream : std::uint32_t {
  kBrownian = 0,    // dB increments of the base process
  kPerturbation = 1,  // dW increments of the beta-perturbed process
  kProbe = 2,       // probe directions and sample points in hypothesis scans
  kMartingale = 3,  // test martingale paths
};

/// Seeded, counter-addressed source of standard normals and uniforms.
///
/// A draw is addressed by (stream, path, step, block); block b of a step holds
/// the normals for components 2b and 2b+1.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)} {}

  /// Two independent N(0,1) variates (Box-Muller on 64-bit uniforms).
  std::array<double, 2> normal_pair(Stream stream, std::uint32_t path,
                                    std::uint32_t step,
                                    std::uint32_t block) const {
    const auto u = uniform_pair(stream, path, step, block);
    const double radius = std::sqrt(-2.0 * std::log(u[0]));
    const double angle = 2.0 * std::numbers::pi * u[1];
    return {radius * std::cos(angle), radius * std::sin(angle)};
  }

  /// Two independent uniforms on the open interval (0, 1).
  std::array<double, 2> uniform_pair(Stream stream, std::uint32_t path,
                                     std::uint32_t step,
                                     std::uint32_t block) const {
    // The top nibble of the block word tags the stream.
    const Philox4x32::Counter ctr{
        step, block | (static_cast<std::uint32_t>(stream) << 28), path, 0u};
    const auto r = Philox4x32::apply(ctr, key_);
    return {to_open_unit(r[0], r[1]), to_open_unit(r[2], r[3])};
  }

  /// Fills `out` with N(0,1) variates for the given (stream, path, step).
  template <typename Out>
  void fill_normals(Stream stream, std::uint32_t path, std::uint32_t step,
                    Out& out) const {
    const auto n = static_cast<std::uint32_t>(out.size());
    for (std::uint32_t b = 0; 2 * b < n; ++b) {
      const auto z = normal_pair(stream, path, step, b);
      out[2 * b] = z[0];
      if (2 * b + 1 < n) out[2 * b + 1] = z[1];
    }
  }

 private:
  static double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits =
        ((std::uint64_t{hi} << 32) | std::uint64_t{lo}) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

  Philox4x32::Key key_;
};

}  // namespace ldp
