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

#include "ldp/psdlinalg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace ldp {

namespace {

using MatLD = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using VecLD = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

struct SymmetricEigenLD {
  VecLD values;  // descending
  MatLD vectors;
};

// Extended precision keeps eigenvectors of eigenvalues near the rcond cutoff
// accurate enough for the Penrose identities at condition numbers ~1e8.
SymmetricEigenLD symmetric_eigen_ld(const Mat& A) {
  require(A.rows() == A.cols(), "matrix must be square");
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  require((A - A.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * scale,
          "matrix must be symmetric");
  const MatLD sym = 0.5L * (A.cast<long double>() +
                            A.transpose().cast<long double>());
  Eigen::SelfAdjointEigenSolver<MatLD> solver(sym);
  if (solver.info() != Eigen::Success)
    throw NumericError("symmetric eigensolver did not converge");
  // Eigen sorts ascending; reverse into descending order.
  const Eigen::Index n = A.rows();
  SymmetricEigenLD out{VecLD(n), MatLD(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.values[i] = solver.eigenvalues()[n - 1 - i];
    out.vectors.col(i) = solver.eigenvectors().col(n - 1 - i);
  }
  return out;
}

double cutoff_for(const Vec& values, double rcond) {
  const double top = values.size() ? std::max(values[0], 0.0) : 0.0;
  return rcond * top;
}

}  // namespace

SymmetricEigen symmetric_eigen(const Mat& A) {
  if (A.rows() == 1 && A.cols() == 1) {
    return {Vec::Constant(1, A(0, 0)), Mat::Identity(1, 1)};
  }
  const SymmetricEigenLD eig = symmetric_eigen_ld(A);
  return {eig.values.cast<double>(), eig.vectors.cast<double>()};
}

PinvResult pseudoinverse(const Mat& A, double rcond) {
  require(rcond > 0.0 && rcond < 1.0, "rcond must lie in (0, 1)");
  const SymmetricEigenLD eig = symmetric_eigen_ld(A);
  PinvResult out;
  out.eigenvalues = eig.values.cast<double>();
  out.cutoff = cutoff_for(out.eigenvalues, rcond);
  VecLD inv = VecLD::Zero(eig.values.size());
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    if (out.eigenvalues[i] > out.cutoff) {
      inv[i] = 1.0L / eig.values[i];
      ++out.rank;
    }
  }
  const MatLD p = eig.vectors * inv.asDiagonal() * eig.vectors.transpose();
  out.pinv = (0.5L * (p + p.transpose())).cast<double>();
  return out;
}

double weighted_norm_sq(const Vec& x, const Mat& G) {
  require(G.rows() == x.size() && G.cols() == x.size(),
          "weighted_norm_sq: dimension mismatch");
  const double q = x.dot(G * x);
  if (q >= 0.0) return q;
  const double scale = G.norm() * x.squaredNorm();
  if (-q < 1e-12 * scale) return 0.0;
  return q;
}

double regularized_quadratic(const SymmetricEigen& eig, const Vec& x,
                             double beta) {
  require(beta > 0.0, "beta must be positive");
  require(eig.vectors.rows() == x.size(),
          "regularized_quadratic: dimension mismatch");
  const Vec y = eig.vectors.transpose() * x;
  double sum = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i)
    sum += y[i] * y[i] / (std::max(eig.values[i], 0.0) + beta);
  return sum;
}

double regularized_quadratic(const Mat& A, const Vec& x, double beta) {
  require(A.rows() == x.size(), "regularized_quadratic: dimension mismatch");
  return regularized_quadratic(symmetric_eigen(A), x, beta);
}

LimitClassification pinv_limit_classify(const SymmetricEigen& eig,
                                        const Vec& x, double rcond,
                                        double range_tol) {
  require(rcond > 0.0 && rcond < 1.0, "rcond must lie in (0, 1)");
  require(eig.vectors.rows() == x.size(),
          "pinv_limit_classify: dimension mismatch");
  LimitClassification out;
  out.cutoff = cutoff_for(eig.values, rcond);
  const Vec y = eig.vectors.transpose() * x;
  Vec projected = Vec::Zero(x.size());
  double value = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (eig.values[i] > out.cutoff) {
      ++out.rank;
      value += y[i] * y[i] / eig.values[i];
      projected += y[i] * eig.vectors.col(i);
    }
  }
  out.range_residual = (projected - x).norm();
  if (out.range_residual <= range_tol * x.norm()) {
    out.kind = LimitClassification::Kind::kFinite;
    out.value = value;
  } else {
    out.kind = LimitClassification::Kind::kDivergent;
  }
  return out;
}

LimitClassification pinv_limit_classify(const Mat& A, const Vec& x,
                                        double rcond, double range_tol) {
  require(A.rows() == x.size(), "pinv_limit_classify: dimension mismatch");
  return pinv_limit_classify(symmetric_eigen(A), x, rcond, range_tol);
}

}  // namespace ldp
