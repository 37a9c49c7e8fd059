// Copyright 2026 The hamfactor Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hamfactor/model.hpp"
#include "hamfactor/shift.hpp"

namespace hamfactor {

enum class InitMode {
  from_xdf,        // leaves of the truncated XDF of g, alpha = 0
  from_xdf_shift,  // leaves of XDF(g - a2' delta delta) plus one shift leaf
  random,
  automatic,  // from_xdf and from_xdf_shift starts (SCDF), best lambda wins
};

std::string to_string(InitMode m);
InitMode init_mode_from_string(const std::string& s);

struct OptimizerConfig {
  double rho = 1e-5;
  int gamma = 2;  // RCDF penalty exponent, 1 or 2
  int max_outer_iters = 50;
  int max_inner_iters = 200;  // per W-, V- or U-step
  double lbfgs_tolerance = 1e-12;
  int lbfgs_memory = 10;
  double norm_plateau_threshold = 0.05;
  int plateau_window = 5;
  std::uint64_t rng_seed = 1;
  InitMode init_mode = InitMode::automatic;
  int n_starts = 1;  // multi-start over rng_seed + i, best lambda wins
  double delta_df = 1e-4;
  double delta_alpha = 1e-3;
  /// Encoding alpha of the finalized output (and of the traced lambda).
  AlphaEncoding alpha_encoding = AlphaEncoding::burg;
};

/// One line of the optimization trace.
struct TraceRecord {
  int start = 0;
  int outer = 0;
  double cost = 0.0;
  double residual = 0.0;  // 1/2 ||g - reconstruction||_F^2
  double penalty = 0.0;
  double lambda = 0.0;    // von Burg norm of the finalized iterate
  double grad_norm_w = 0.0;
  double grad_norm_x = 0.0;
  int n_alpha = 0;
  bool accepted = true;
};

struct OptimizationResult {
  DoubleFactorization fact;
  std::vector<TraceRecord> trace;
  std::string stop_reason;
  double residual = 0.0;
};

void write_trace_jsonl(std::ostream& os, std::span<const TraceRecord> trace);

// Cost functions and gradients. Empty `signs` means every leaf has sign +1.

/// 1/2 || g - sum_t s_t (U^t (x) U^t) V^t (U^t (x) U^t)^T ||_F^2.
double cost_cdf(std::span<const Matrix> u, std::span<const Matrix> v,
                const TwoElectronTensor& g, std::span<const int> signs = {});

/// Residual with V^t = W^t (x) W^t plus rho sum_{t,k,l} |W_k W_l - alpha^t|.
double cost_scdf(std::span<const Matrix> u, std::span<const Vector> w,
                 std::span<const double> alpha, const TwoElectronTensor& g,
                 double rho, std::span<const int> signs = {});

std::vector<Vector> grad_scdf_w(std::span<const Matrix> u,
                                std::span<const Vector> w,
                                std::span<const double> alpha,
                                const TwoElectronTensor& g, double rho,
                                std::span<const int> signs = {});

/// Derivative of the residual with respect to the entries of U^t.
std::vector<Matrix> grad_scdf_u(std::span<const Matrix> u,
                                std::span<const Vector> w,
                                const TwoElectronTensor& g,
                                std::span<const int> signs = {});

/// Exact exp(X) via scaling and squaring.
Matrix rotation_from_generator(const Matrix& x);

/**
 * Gradient with respect to antisymmetric generators, U^t = U0^t exp(X^t).
 * Entry (i, j), i < j, is the derivative for the joint move
 * X_ij += h, X_ji -= h; the returned matrices are antisymmetric.
 */
std::vector<Matrix> grad_scdf_x(std::span<const Matrix> u0,
                                std::span<const Matrix> x,
                                std::span<const Vector> w,
                                const TwoElectronTensor& g,
                                std::span<const int> signs = {});

/// Same for full cores V^t (CDF/RCDF U-step).
std::vector<Matrix> grad_cdf_u(std::span<const Matrix> u,
                               std::span<const Matrix> v,
                               const TwoElectronTensor& g,
                               std::span<const int> signs = {});

/**
 * Exact V-step: minimizes the residual (+ rho ||V||^2 when ridge_rho > 0)
 * over all V^t for fixed U^t by conjugate gradients on the normal equations
 * sum_s S^{ts} V^s S^{ts}^T + 2 rho V^t = C^t^T g C^t, S^{ts} = (U^t^T U^s)^2
 * taken entrywise.
 */
std::vector<Matrix> solve_v_step(std::span<const Matrix> u,
                                 const TwoElectronTensor& g, double ridge_rho,
                                 std::span<const Matrix> v0 = {});

/// Nested W / alpha / X minimization. `one_body`, when given, sets a1' to
/// the median of f_eig and adds the one-body term to the traced lambda.
OptimizationResult optimize_scdf(const TwoElectronTensor& g, int n_df,
                                 const OptimizerConfig& config,
                                 const OneBodyTensors* one_body = nullptr);

/// Alternating exact V-step / L-BFGS U-step. Output leaves carry full V^t.
OptimizationResult optimize_cdf(const TwoElectronTensor& g, int n_df,
                                const OptimizerConfig& config,
                                const OneBodyTensors* one_body = nullptr);

/// optimize_cdf with rho ||V||^2 (gamma 2, ridge V-step) or rho sum |V_kl|
/// (gamma 1, sub-gradient L-BFGS V-step).
OptimizationResult optimize_rcdf(const TwoElectronTensor& g, int n_df,
                                 const OptimizerConfig& config,
                                 const OneBodyTensors* one_body = nullptr);

}  // namespace hamfactor
