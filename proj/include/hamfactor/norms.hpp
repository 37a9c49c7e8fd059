// Copyright 2026 The hamfactor Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "hamfactor/model.hpp"
#include "json.hpp"

namespace hamfactor {

/// sum_k |f_k - a1'|; a1' is the factorization's recorded one-body shift.
double one_body_norm(const DoubleFactorization& fact, const Vector& f_eig);

/**
 * Two-body part of the von Burg norm: 1/4 (sum_k |W_k|)^2 per plain leaf,
 * 1/4 [(sum |P_k|)^2 + (sum |Q_k|)^2] per shifted leaf, and for a full core
 * V = sum_i s_i v_i v_i^T the sum of 1/4 |s_i| (sum_k |v_ik|)^2.
 * Shifted leaves without a stored split are split on the fly.
 */
double two_body_norm_burg(const DoubleFactorization& fact);

/// 1/2 sum_kl |V'_kl| - 1/4 sum_k |V'_kk| with V' = W (x) W - alpha 1 (x) 1.
double two_body_norm_lcu(const DoubleFactorization& fact);

double lambda_burg(const DoubleFactorization& fact,
                   const OneBodyTensors& one_body);
double lambda_lcu(const DoubleFactorization& fact,
                  const OneBodyTensors& one_body);

struct NormReport {
  double lambda_burg = 0.0;
  double lambda_lcu = 0.0;
  double one_body = 0.0;
  double two_body_burg = 0.0;
  double two_body_lcu = 0.0;
  /// Both norms with every alpha^t set to zero (the leaves keep W^t).
  double lambda_burg_no_alpha = 0.0;
  double lambda_lcu_no_alpha = 0.0;
  int n_leaves = 0;
  int n_alpha = 0;
  double mean_xi = 0.0;
  std::vector<int> xi;
  std::vector<int> theta;
};

NormReport norm_report(const DoubleFactorization& fact,
                       const OneBodyTensors& one_body);

nlohmann::json to_json(const NormReport& r);

}  // namespace hamfactor
