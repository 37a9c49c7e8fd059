// Copyright 2026 The hamfactor Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "hamfactor/model.hpp"

namespace hamfactor {

/// Eigen-split of the N^2 x N^2 integral matrix, (pq|rs) = sum_t s_t L^t_pq L^t_rs.
struct FirstFactorization {
  int n_orbitals = 0;
  std::vector<Matrix> factors;       // L^t, symmetric N x N
  std::vector<int> signs;            // +1, or -1 for negative eigenvalues
  std::vector<double> eigenvalues;   // as returned (after clamping)
  int n_clamped = 0;                 // tiny negative eigenvalues set to zero
};

/**
 * Keeps the n_df eigenpairs of largest |lambda|, ordered by descending
 * |lambda| with ties broken by the lexicographic order of the
 * sign-canonicalized eigenvectors.
 *
 * With keep_signed == false (the default) the matrix must be positive
 * semidefinite: eigenvalues below -1e-10 raise NonPSDTensor, smaller
 * negative ones are clamped to zero. keep_signed == true is used for
 * shifted tensors and records the sign of each eigenvalue instead.
 */
FirstFactorization first_factorization(const TwoElectronTensor& g, int n_df,
                                       bool keep_signed = false);

/// L^t = U^t diag(W^t) U^t^T for every leaf, then truncation of W^t.
/// Leaves with no surviving component are dropped.
DoubleFactorization second_factorization(
    const FirstFactorization& first, double delta_df,
    TruncationMode mode = TruncationMode::component);

/// Both steps; `method` of the result is XDF and every alpha is zero.
DoubleFactorization factorize_xdf(
    const TwoElectronTensor& g, int n_df, double delta_df,
    TruncationMode mode = TruncationMode::component, bool keep_signed = false);

/// Re-applies the truncation rule to W^t in place and refreshes xi.
/// Returns the number of components removed.
int truncate_factor(Vector& w, double delta_df, TruncationMode mode);

/// Sum over leaves of sign * U (W (x) W or V) U^T, plus a2' delta delta for
/// a globally shifted factorization. The per-leaf alpha^t never enters: the
/// stored W^t already approximate the unshifted tensor.
TwoElectronTensor reconstruct_tensor(const DoubleFactorization& fact);

}  // namespace hamfactor
