// Copyright 2026 The hamfactor Authors
// SPDX-License-Identifier: Apache-2.0

#include "hamfactor/norms.hpp"

#include <cmath>

#include "hamfactor/shift.hpp"

namespace hamfactor {

namespace {

double quarter_square(const Vector& v) {
  const double s = v.cwiseAbs().sum();
  return 0.25 * s * s;
}

double leaf_burg(const Leaf& leaf) {
  if (leaf.full_rank()) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(
        0.5 * (leaf.core + leaf.core.transpose()));
    double s = 0.0;
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
      const double a = eig.eigenvectors().col(i).cwiseAbs().sum();
      s += 0.25 * std::abs(eig.eigenvalues()(i)) * a * a;
    }
    return s;
  }
  if (!leaf.shifted()) return quarter_square(leaf.factor);
  if (leaf.p.size() > 0) return quarter_square(leaf.p) + quarter_square(leaf.q);
  const ShiftedFactorPair pair = split_shifted_factor(leaf.factor, leaf.alpha);
  return quarter_square(pair.p) + quarter_square(pair.q);
}

double leaf_lcu(const Leaf& leaf) {
  Matrix v = leaf.full_rank() ? leaf.core
                              : Matrix(leaf.factor * leaf.factor.transpose());
  v.array() -= leaf.alpha;
  return 0.5 * v.cwiseAbs().sum() - 0.25 * v.diagonal().cwiseAbs().sum();
}

}  // namespace

double one_body_norm(const DoubleFactorization& fact, const Vector& f_eig) {
  return (f_eig.array() - fact.a1_prime).abs().sum();
}

double two_body_norm_burg(const DoubleFactorization& fact) {
  double s = 0.0;
  for (const Leaf& leaf : fact.leaves) s += leaf_burg(leaf);
  return s;
}

double two_body_norm_lcu(const DoubleFactorization& fact) {
  double s = 0.0;
  for (const Leaf& leaf : fact.leaves) s += leaf_lcu(leaf);
  return s;
}

double lambda_burg(const DoubleFactorization& fact,
                   const OneBodyTensors& one_body) {
  return one_body_norm(fact, one_body.eig_values) + two_body_norm_burg(fact);
}

double lambda_lcu(const DoubleFactorization& fact,
                  const OneBodyTensors& one_body) {
  return one_body_norm(fact, one_body.eig_values) + two_body_norm_lcu(fact);
}

NormReport norm_report(const DoubleFactorization& fact,
                       const OneBodyTensors& one_body) {
  NormReport r;
  r.one_body = one_body_norm(fact, one_body.eig_values);
  r.two_body_burg = two_body_norm_burg(fact);
  r.two_body_lcu = two_body_norm_lcu(fact);
  r.lambda_burg = r.one_body + r.two_body_burg;
  r.lambda_lcu = r.one_body + r.two_body_lcu;

  DoubleFactorization bare = fact;
  for (Leaf& leaf : bare.leaves) {
    leaf.alpha = 0.0;
    leaf.p.resize(0);
    leaf.q.resize(0);
    leaf.theta = 0;
  }
  r.lambda_burg_no_alpha = r.one_body + two_body_norm_burg(bare);
  r.lambda_lcu_no_alpha = r.one_body + two_body_norm_lcu(bare);

  r.n_leaves = fact.n_leaves();
  r.n_alpha = fact.n_alpha();
  r.mean_xi = fact.mean_xi();
  r.xi = fact.leaf_ranks();
  for (const Leaf& leaf : fact.leaves) r.theta.push_back(leaf.theta);
  return r;
}

nlohmann::json to_json(const NormReport& r) {
  return {{"lambda_burg", r.lambda_burg},
          {"lambda_lcu", r.lambda_lcu},
          {"one_body", r.one_body},
          {"two_body_burg", r.two_body_burg},
          {"two_body_lcu", r.two_body_lcu},
          {"lambda_burg_no_alpha", r.lambda_burg_no_alpha},
          {"lambda_lcu_no_alpha", r.lambda_lcu_no_alpha},
          {"n_leaves", r.n_leaves},
          {"n_alpha", r.n_alpha},
          {"mean_xi", r.mean_xi},
          {"xi", r.xi},
          {"theta", r.theta}};
}

}  // namespace hamfactor
