// Copyright 2026 The hamfactor Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>

#include "hamfactor/model.hpp"

namespace hamfactor {

/// Returns f(x) and writes the gradient into `grad` (pre-sized to x).
using Objective = std::function<double(const Vector& x, Vector& grad)>;

struct LbfgsOptions {
  int max_iterations = 200;
  int memory = 10;
  /// Converged when ||grad||_inf <= tolerance or the relative decrease of f
  /// over one iteration is <= tolerance.
  double tolerance = 1e-12;
  double armijo = 1e-4;
  int max_backtracks = 50;
};

struct LbfgsResult {
  Vector x;
  double value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/**
 * Limited-memory BFGS with a backtracking Armijo line search. Each accepted
 * step decreases the objective, so the final value never exceeds f(x0).
 * Curvature pairs with s.y <= 1e-16 |s||y| are skipped; a failed line
 * search restarts once from steepest descent before giving up.
 * Throws NumericalError if f(x0) is not finite.
 */
LbfgsResult minimize_lbfgs(const Objective& f, Vector x0,
                           const LbfgsOptions& options = {});

}  // namespace hamfactor
