// Copyright 2026 The hamfactor Authors
// SPDX-License-Identifier: Apache-2.0

#include "hamfactor/xdf.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hamfactor/errors.hpp"
#include "linalg.hpp"

namespace hamfactor {

namespace {

constexpr double kNegativeTolerance = 1e-10;

bool lexicographically_less(const Vector& a, const Vector& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) < b(i)) return true;
    if (a(i) > b(i)) return false;
  }
  return false;
}

}  // namespace

FirstFactorization first_factorization(const TwoElectronTensor& g, int n_df,
                                       bool keep_signed) {
  const int n = g.n_orbitals();
  const int n2 = n * n;
  if (n_df < 1) throw ValidationError("n_df must be >= 1");
  if (n_df > n2) throw ValidationError("n_df exceeds N^2");

  const Matrix m = 0.5 * (g.matrix() + g.matrix().transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  if (eig.info() != Eigen::Success)
    throw NumericalError("eigendecomposition of the integral matrix failed");

  Matrix vectors = eig.eigenvectors();
  const Vector& values = eig.eigenvalues();
  for (int i = 0; i < n2; ++i) detail::canonicalize_sign(vectors.col(i));

  std::vector<int> order(n2);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const double la = std::abs(values(a));
    const double lb = std::abs(values(b));
    if (la != lb) return la > lb;
    return lexicographically_less(vectors.col(a), vectors.col(b));
  });

  FirstFactorization out;
  out.n_orbitals = n;
  for (int i = 0; i < n_df; ++i) {
    const int idx = order[i];
    double lambda = values(idx);
    int sign = 1;
    if (lambda < 0) {
      if (keep_signed) {
        sign = -1;
      } else if (lambda < -kNegativeTolerance) {
        throw NonPSDTensor("integral matrix has eigenvalue " +
                           std::to_string(lambda) +
                           "; it is not positive semidefinite");
      } else {
        lambda = 0.0;
        ++out.n_clamped;
      }
    }
    Matrix l = std::sqrt(std::abs(lambda)) *
               Eigen::Map<const Matrix>(vectors.col(idx).data(), n, n);
    out.factors.push_back(0.5 * (l + l.transpose()));
    out.signs.push_back(sign);
    out.eigenvalues.push_back(lambda);
  }
  return out;
}

int truncate_factor(Vector& w, double delta_df, TruncationMode mode) {
  const double scale =
      mode == TruncationMode::combined ? w.cwiseAbs().sum() : 1.0;
  int removed = 0;
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    if (w(k) != 0.0 && scale * std::abs(w(k)) < delta_df) {
      w(k) = 0.0;
      ++removed;
    }
  }
  return removed;
}

DoubleFactorization second_factorization(const FirstFactorization& first,
                                         double delta_df,
                                         TruncationMode mode) {
  if (delta_df < 0) throw ValidationError("delta_df must be >= 0");
  DoubleFactorization out;
  out.n_orbitals = first.n_orbitals;
  out.method = Method::XDF;
  out.thresholds.delta_df = delta_df;
  out.truncation = mode;
  out.variant = "xdf";

  for (std::size_t t = 0; t < first.factors.size(); ++t) {
    const Matrix& l = first.factors[t];
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (l + l.transpose()));
    if (eig.info() != Eigen::Success)
      throw NumericalError("eigendecomposition of leaf " + std::to_string(t) +
                           " failed");
    const Vector& vals = eig.eigenvalues();
    const Matrix& vecs = eig.eigenvectors();
    const int n = static_cast<int>(vals.size());

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return std::abs(vals(a)) > std::abs(vals(b));
    });

    Leaf leaf;
    leaf.rotation.resize(n, n);
    leaf.factor.resize(n);
    for (int k = 0; k < n; ++k) {
      leaf.rotation.col(k) = vecs.col(order[k]);
      detail::canonicalize_sign(leaf.rotation.col(k));
      leaf.factor(k) = vals(order[k]);
    }
    truncate_factor(leaf.factor, delta_df, mode);
    leaf.xi = static_cast<int>((leaf.factor.array() != 0.0).count());
    leaf.sign = first.signs.empty() ? 1 : first.signs[t];
    if (leaf.xi == 0) continue;
    out.leaves.push_back(std::move(leaf));
  }
  return out;
}

DoubleFactorization factorize_xdf(const TwoElectronTensor& g, int n_df,
                                  double delta_df, TruncationMode mode,
                                  bool keep_signed) {
  return second_factorization(first_factorization(g, n_df, keep_signed),
                              delta_df, mode);
}

TwoElectronTensor reconstruct_tensor(const DoubleFactorization& fact) {
  const int n = fact.n_orbitals;
  TwoElectronTensor g(n);
  auto m = g.matrix();
  for (const Leaf& leaf : fact.leaves) {
    if (leaf.full_rank()) {
      const Matrix c = detail::outer_columns(leaf.rotation);
      m.noalias() += leaf.sign * (c * leaf.core * c.transpose());
    } else {
      const Vector a = detail::leaf_vector(leaf.rotation, leaf.factor);
      m.noalias() += leaf.sign * (a * a.transpose());
    }
  }
  if (fact.a2_prime != 0.0) {
    for (int p = 0; p < n; ++p)
      for (int r = 0; r < n; ++r) g(p, p, r, r) += fact.a2_prime;
  }
  return g;
}

}  // namespace hamfactor
