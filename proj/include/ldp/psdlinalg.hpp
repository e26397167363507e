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

#include "ldp/common.hpp"

namespace ldp {

inline constexpr double kDefaultRcond = 1e-10;
inline constexpr double kDefaultRangeTol = 1e-7;

/// Eigenpairs of a symmetric matrix, eigenvalues in descending order.
struct SymmetricEigen {
  Vec values;
  Mat vectors;  // column i pairs with values[i]
};

/// Dense symmetric eigendecomposition (Householder tridiagonalization + QL).
/// Throws std::invalid_argument if A is not symmetric to 1e-10 relative.
SymmetricEigen symmetric_eigen(const Mat& A);

struct PinvResult {
  Mat pinv;
  int rank = 0;
  Vec eigenvalues;  // descending
  double cutoff = 0.0;  // absolute threshold: eigenvalues <= cutoff are zeros
};

/// Moore-Penrose pseudoinverse of a symmetric PSD matrix via its eigenbasis.
/// Eigenvalues below rcond * lambda_max are treated as zero.
PinvResult pseudoinverse(const Mat& A, double rcond = kDefaultRcond);

/// <x, G x>, clamped at 0 when roundoff yields a tiny negative.
double weighted_norm_sq(const Vec& x, const Mat& G);

/// <x, (A + beta I)^{-1} x> evaluated in the eigenbasis of A.
double regularized_quadratic(const Mat& A, const Vec& x, double beta);

/// Same, reusing a precomputed decomposition of A.
double regularized_quadratic(const SymmetricEigen& eig, const Vec& x,
                             double beta);

struct LimitClassification {
  enum class Kind { kFinite, kDivergent };
  Kind kind = Kind::kFinite;
  double value = 0.0;  // meaningful only when kind == kFinite
  double range_residual = 0.0;  // |A A^+ x - x|
  int rank = 0;
  double cutoff = 0.0;

  bool finite() const { return kind == Kind::kFinite; }
};

/// Limit of <x, (A + beta I)^{-1} x> as beta -> 0: |x|^2_{A^+} when x lies in
/// range(A) (residual <= range_tol |x|), divergent otherwise.
LimitClassification pinv_limit_classify(const Mat& A, const Vec& x,
                                        double rcond = kDefaultRcond,
                                        double range_tol = kDefaultRangeTol);

LimitClassification pinv_limit_classify(const SymmetricEigen& eig,
                                        const Vec& x,
                                        double rcond = kDefaultRcond,
                                        double range_tol = kDefaultRangeTol);

}  // namespace ldp
