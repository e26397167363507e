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

namespace ldp {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Exact (Clopper-Pearson) two-sided interval for a binomial proportion.
Interval clopper_pearson(std::uint64_t hits, std::uint64_t n,
                         double confidence = 0.95);

/// sqrt(p (1 - p) / n) at the plug-in estimate p = hits / n.
double binomial_std_error(std::uint64_t hits, std::uint64_t n);

/// Whether two intervals intersect.
inline bool overlaps(const Interval& a, const Interval& b) {
  return a.lo <= b.hi && b.lo <= a.hi;
}

}  // namespace ldp
