// Copyright 2026 The hamfactor Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "hamfactor/model.hpp"

namespace hamfactor {

/// Rank-two split W (x) W - alpha 1 (x) 1 = P (x) P - Q (x) Q.
struct ShiftedFactorPair {
  Vector p;
  Vector q;
  int theta = 0;  // nonzero entries of q
};

/**
 * Electron-number shift carried by a factorization. The encoded operator
 * satisfies H_B = H - a1 N_e - a2 N_e^2, so
 * E(H) = E(H_B) + a1 n_e + a2 n_e^2 in every n_e sector.
 */
struct ShiftCorrection {
  double a1 = 0.0;
  double a2 = 0.0;
  int n_electrons = 0;
};

struct OneBodyShift {
  double a1_prime = 0.0;
  double shifted_norm = 0.0;
};

/// Median of the values; the midpoint of the central pair for even sizes.
double median(std::vector<double> values);

/// a1' = median(f_eig), the minimizer of sum_k |f_k - a1'|.
OneBodyShift one_body_shift(const Vector& f_eigenvalues);

enum class ShiftObjective { burg, frobenius };

struct GlobalShiftResult {
  double a2_prime = 0.0;
  double two_body_norm = 0.0;           // 1/4 sum_t (sum_k |W_k|)^2 at a2'
  double unshifted_two_body_norm = 0.0;  // same at a2' = 0
  DoubleFactorization fact;
};

/// Shift objective for the global search: the two-body von Burg norm of
/// XDF(g - a2' delta delta). Exposed for oracle scans.
double shifted_two_body_norm(const TwoElectronTensor& g, double a2_prime,
                             int n_df, double delta_df,
                             TruncationMode mode = TruncationMode::component);

/**
 * XDF of g - a2' delta_pq delta_rs with a2' chosen by a coarse scan and a
 * golden-section refinement (tolerance 1e-6). The shifted tensor may be
 * indefinite; negative eigenvalues become leaves with sign -1. a2' = 0 is
 * always a candidate, so the result never exceeds the unshifted norm.
 * `frobenius` picks the median of g_pprr instead, which minimizes the
 * entrywise 1-norm of the shifted tensor.
 */
GlobalShiftResult global_two_body_shift(
    const TwoElectronTensor& g, int n_df, double delta_df,
    ShiftObjective objective = ShiftObjective::burg,
    TruncationMode mode = TruncationMode::component);

/// Throws InvalidShiftSplit when the two nonzero eigenvalues share a sign
/// (alpha < 0).
ShiftedFactorPair split_shifted_factor(const Vector& w, double alpha);

/// Zeroes alpha^t with |alpha^t| < delta_alpha and clears stale splits.
DoubleFactorization apply_alpha_threshold(DoubleFactorization fact,
                                          double delta_alpha);

/// How finalize_shifts picks the alpha^t that the encoding uses.
enum class AlphaEncoding {
  keep,  // the stored alpha^t (the optimizer's median)
  burg,  // per leaf, the alpha >= 0 minimizing its von Burg contribution
};

/// 1/4 [(sum |P_k|)^2 + (sum |Q_k|)^2] of the split at alpha.
double split_burg_norm(const Vector& w, double alpha);

/// Minimizer over alpha >= 0 of split_burg_norm: every nonnegative product
/// W_k W_l is a candidate, then golden-section refinement next to the best.
double burg_optimal_alpha(const Vector& w);

/// Optional alpha re-selection, the alpha threshold, then the (P, Q) split
/// of every shifted leaf with the factorization's delta_df truncation
/// applied to both vectors. Any alpha^t keeps the energy bookkeeping exact.
DoubleFactorization finalize_shifts(DoubleFactorization fact,
                                    double delta_alpha,
                                    AlphaEncoding encoding = AlphaEncoding::keep);

ShiftCorrection shift_correction(const DoubleFactorization& fact,
                                 int n_electrons);

double correction_energy(const ShiftCorrection& corr);

}  // namespace hamfactor
