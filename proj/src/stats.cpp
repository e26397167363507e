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

#include "ldp/stats.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <cmath>
#include <stdexcept>

namespace ldp {

Interval clopper_pearson(std::uint64_t hits, std::uint64_t n,
                         double confidence) {
  if (n == 0 || hits > n)
    throw std::invalid_argument("clopper_pearson: need 0 <= hits <= n, n >= 1");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw std::invalid_argument("clopper_pearson: confidence must be in (0,1)");
  const double alpha = 1.0 - confidence;
  const auto k = static_cast<double>(hits);
  const auto m = static_cast<double>(n);
  Interval out;
  out.lo = hits == 0 ? 0.0
                     : boost::math::ibeta_inv(k, m - k + 1.0, alpha / 2.0);
  out.hi = hits == n
               ? 1.0
               : boost::math::ibeta_inv(k + 1.0, m - k, 1.0 - alpha / 2.0);
  return out;
}

double binomial_std_error(std::uint64_t hits, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("binomial_std_error: n must be >= 1");
  const double p = static_cast<double>(hits) / static_cast<double>(n);
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

}  // namespace ldp
