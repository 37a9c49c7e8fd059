// Copyright 2026 The hamfactor Authors
// SPDX-License-Identifier: Apache-2.0

#include "hamfactor/lbfgs.hpp"

#include <cmath>
#include <deque>

#include "hamfactor/errors.hpp"

namespace hamfactor {

namespace {

struct Pair {
  Vector s;
  Vector y;
  double rho;
};

Vector two_loop(const std::deque<Pair>& mem, const Vector& g) {
  Vector d = -g;
  std::vector<double> a(mem.size());
  for (int i = static_cast<int>(mem.size()) - 1; i >= 0; --i) {
    a[i] = mem[i].rho * mem[i].s.dot(d);
    d -= a[i] * mem[i].y;
  }
  if (!mem.empty()) {
    const Pair& last = mem.back();
    d *= last.s.dot(last.y) / last.y.squaredNorm();
  }
  for (std::size_t i = 0; i < mem.size(); ++i) {
    const double b = mem[i].rho * mem[i].y.dot(d);
    d += (a[i] - b) * mem[i].s;
  }
  return d;
}

}  // namespace

LbfgsResult minimize_lbfgs(const Objective& f, Vector x0,
                           const LbfgsOptions& options) {
  LbfgsResult out;
  out.x = std::move(x0);
  Vector grad(out.x.size());
  out.value = f(out.x, grad);
  ++out.evaluations;
  if (!std::isfinite(out.value))
    throw NumericalError("objective is not finite at the starting point");
  out.grad_norm = out.x.size() ? grad.cwiseAbs().maxCoeff() : 0.0;
  if (out.x.size() == 0 || out.grad_norm <= options.tolerance) {
    out.converged = true;
    return out;
  }

  std::deque<Pair> mem;
  Vector trial_grad(out.x.size());
  bool restarted = false;
  while (out.iterations < options.max_iterations) {
    Vector d = two_loop(mem, grad);
    double slope = d.dot(grad);
    if (!(slope < 0)) {
      mem.clear();
      d = -grad;
      slope = -grad.squaredNorm();
    }
    double step = mem.empty() ? std::min(1.0, 1.0 / d.cwiseAbs().maxCoeff())
                              : 1.0;

    bool accepted = false;
    Vector trial;
    double trial_value = 0.0;
    for (int bt = 0; bt < options.max_backtracks; ++bt) {
      trial = out.x + step * d;
      trial_value = f(trial, trial_grad);
      ++out.evaluations;
      if (std::isfinite(trial_value) &&
          trial_value <= out.value + options.armijo * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (restarted || mem.empty()) break;
      mem.clear();
      restarted = true;
      continue;
    }
    restarted = false;
    ++out.iterations;

    Pair pr{trial - out.x, trial_grad - grad, 0.0};
    const double sy = pr.s.dot(pr.y);
    if (sy > 1e-16 * pr.s.norm() * pr.y.norm() && sy > 0) {
      pr.rho = 1.0 / sy;
      mem.push_back(std::move(pr));
      if (static_cast<int>(mem.size()) > options.memory) mem.pop_front();
    }

    const double previous = out.value;
    out.x = std::move(trial);
    out.value = trial_value;
    grad = trial_grad;
    out.grad_norm = grad.cwiseAbs().maxCoeff();
    const double scale =
        std::max({std::abs(previous), std::abs(out.value), 1e-300});
    if (out.grad_norm <= options.tolerance ||
        (previous - out.value) <= options.tolerance * scale) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace hamfactor
