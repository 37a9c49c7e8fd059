// Copyright 2026 The hamfactor Authors
// SPDX-License-Identifier: Apache-2.0

// Small dense helpers shared by the factorization modules.

#pragma once

#include <cmath>

#include "hamfactor/model.hpp"

namespace hamfactor::detail {

/// Flips v so that its largest-magnitude entry (the first one, if several
/// agree to 1e-12 relative) is positive.
inline void canonicalize_sign(Eigen::Ref<Vector> v) {
  if (v.size() == 0) return;
  const double top = v.cwiseAbs().maxCoeff();
  if (top == 0.0) return;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= top * (1.0 - 1e-12)) {
      if (v(i) < 0) v = -v;
      return;
    }
  }
}

/// Columns of C are vec(u_k u_k^T) for the columns u_k of U (N^2 x N).
inline Matrix outer_columns(const Matrix& u) {
  const Eigen::Index n = u.rows();
  Matrix c(n * n, u.cols());
  for (Eigen::Index k = 0; k < u.cols(); ++k) {
    Eigen::Map<Matrix> block(c.col(k).data(), n, n);
    block.noalias() = u.col(k) * u.col(k).transpose();
  }
  return c;
}

/// vec(U diag(w) U^T), the composite-index vector of one rank-one leaf.
inline Vector leaf_vector(const Matrix& u, const Vector& w) {
  const Eigen::Index n = u.rows();
  Matrix a = u * w.asDiagonal() * u.transpose();
  a = 0.5 * (a + a.transpose()).eval();
  return Eigen::Map<const Vector>(a.data(), n * n);
}

inline double sign_of(double x) { return (x > 0) - (x < 0); }

}  // namespace hamfactor::detail
