// Copyright 2026 The hamfactor Authors
// SPDX-License-Identifier: Apache-2.0

#include "hamfactor/shift.hpp"

#include <algorithm>
#include <cmath>

#include "hamfactor/errors.hpp"
#include "hamfactor/xdf.hpp"
#include "linalg.hpp"

namespace hamfactor {

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  const std::size_t n = values.size();
  const std::size_t mid = n / 2;
  std::nth_element(values.begin(), values.begin() + mid, values.end());
  const double upper = values[mid];
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + mid);
  return 0.5 * (lower + upper);
}

OneBodyShift one_body_shift(const Vector& f_eigenvalues) {
  OneBodyShift out;
  out.a1_prime = median({f_eigenvalues.data(),
                         f_eigenvalues.data() + f_eigenvalues.size()});
  out.shifted_norm = (f_eigenvalues.array() - out.a1_prime).abs().sum();
  return out;
}

namespace {

double burg_two_body(const DoubleFactorization& fact) {
  double s = 0.0;
  for (const Leaf& leaf : fact.leaves) {
    const double a = leaf.factor.cwiseAbs().sum();
    s += 0.25 * a * a;
  }
  return s;
}

}  // namespace

double shifted_two_body_norm(const TwoElectronTensor& g, double a2_prime,
                             int n_df, double delta_df, TruncationMode mode) {
  const TwoElectronTensor shifted = subtract_number_squared(g, a2_prime);
  return burg_two_body(factorize_xdf(shifted, n_df, delta_df, mode, true));
}

GlobalShiftResult global_two_body_shift(const TwoElectronTensor& g, int n_df,
                                        double delta_df,
                                        ShiftObjective objective,
                                        TruncationMode mode) {
  const int n = g.n_orbitals();
  std::vector<double> diag;
  diag.reserve(static_cast<std::size_t>(n) * n);
  for (int p = 0; p < n; ++p)
    for (int r = 0; r < n; ++r) diag.push_back(g(p, p, r, r));

  auto objective_at = [&](double a) {
    return shifted_two_body_norm(g, a, n_df, delta_df, mode);
  };

  GlobalShiftResult out;
  out.unshifted_two_body_norm = objective_at(0.0);
  double best_a = 0.0;
  double best_v = out.unshifted_two_body_norm;

  if (objective == ShiftObjective::frobenius) {
    const double a = median(diag);
    const double v = objective_at(a);
    best_a = a;
    best_v = v;
  } else if (!diag.empty()) {
    const double lo = std::min(0.0, *std::min_element(diag.begin(), diag.end()));
    const double hi = std::max(0.0, *std::max_element(diag.begin(), diag.end()));
    if (hi > lo) {
      constexpr int kScan = 41;
      const double step = (hi - lo) / (kScan - 1);
      std::vector<double> xs(kScan), vs(kScan);
      int arg = 0;
      for (int i = 0; i < kScan; ++i) {
        xs[i] = lo + step * i;
        vs[i] = objective_at(xs[i]);
        if (vs[i] < vs[arg]) arg = i;
      }
      double a = xs[std::max(arg - 1, 0)];
      double b = xs[std::min(arg + 1, kScan - 1)];
      const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
      double c = b - inv_phi * (b - a);
      double d = a + inv_phi * (b - a);
      double fc = objective_at(c);
      double fd = objective_at(d);
      while (b - a > 1e-6) {
        if (fc < fd) {
          b = d;
          d = c;
          fd = fc;
          c = b - inv_phi * (b - a);
          fc = objective_at(c);
        } else {
          a = c;
          c = d;
          fc = fd;
          d = a + inv_phi * (b - a);
          fd = objective_at(d);
        }
      }
      const double xm = 0.5 * (a + b);
      const double fm = objective_at(xm);
      if (vs[arg] < best_v) {
        best_a = xs[arg];
        best_v = vs[arg];
      }
      if (fm < best_v) {
        best_a = xm;
        best_v = fm;
      }
    }
  }

  out.a2_prime = best_a;
  out.two_body_norm = best_v;
  out.fact = factorize_xdf(subtract_number_squared(g, best_a), n_df, delta_df,
                           mode, true);
  out.fact.a2_prime = best_a;
  out.fact.variant = "xdf_shift";
  return out;
}

ShiftedFactorPair split_shifted_factor(const Vector& w, double alpha) {
  const Eigen::Index n = w.size();
  ShiftedFactorPair out;
  if (alpha == 0.0) {
    out.p = w;
    out.q = Vector::Zero(n);
    return out;
  }
  if (alpha < 0.0)
    throw InvalidShiftSplit("alpha < 0 gives two positive eigenvalues");

  const double root_n = std::sqrt(static_cast<double>(n));
  const Vector q1 = Vector::Constant(n, 1.0 / root_n);
  const double a = w.dot(q1);
  Vector perp = w - a * q1;
  const double b = perp.norm();

  out.p = Vector::Zero(n);
  out.q = Vector::Zero(n);
  if (b <= 1e-14 * std::max(1.0, w.norm())) {
    // W parallel to 1: the difference is rank one along 1.
    const double c = a * a - alpha * n;
    if (c >= 0)
      out.p = std::sqrt(c) * q1;
    else
      out.q = std::sqrt(-c) * q1;
  } else {
    const Vector q2 = perp / b;
    Eigen::Matrix2d s;
    s << a * a - alpha * n, a * b, a * b, b * b;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(s);
    const double lm = eig.eigenvalues()(0);
    const double lp = eig.eigenvalues()(1);
    const double tol = 1e-14 * std::max(1.0, std::abs(lp) + std::abs(lm));
    if (lp < -tol || lm > tol)
      throw InvalidShiftSplit("rank-two split has eigenvalues of equal sign");
    const Eigen::Vector2d vp = eig.eigenvectors().col(1);
    const Eigen::Vector2d vm = eig.eigenvectors().col(0);
    out.p = std::sqrt(std::max(lp, 0.0)) * (vp(0) * q1 + vp(1) * q2);
    out.q = std::sqrt(std::max(-lm, 0.0)) * (vm(0) * q1 + vm(1) * q2);
  }
  detail::canonicalize_sign(out.p);
  detail::canonicalize_sign(out.q);
  out.theta = static_cast<int>((out.q.array() != 0.0).count());
  return out;
}

DoubleFactorization apply_alpha_threshold(DoubleFactorization fact,
                                          double delta_alpha) {
  if (delta_alpha < 0) throw ValidationError("delta_alpha must be >= 0");
  for (Leaf& leaf : fact.leaves) {
    if (std::abs(leaf.alpha) < delta_alpha) leaf.alpha = 0.0;
    if (!leaf.shifted()) {
      leaf.p.resize(0);
      leaf.q.resize(0);
      leaf.theta = 0;
    }
  }
  fact.thresholds.delta_alpha = delta_alpha;
  return fact;
}

double split_burg_norm(const Vector& w, double alpha) {
  const ShiftedFactorPair pair = split_shifted_factor(w, alpha);
  const double a = pair.p.cwiseAbs().sum();
  const double b = pair.q.cwiseAbs().sum();
  return 0.25 * (a * a + b * b);
}

double burg_optimal_alpha(const Vector& w) {
  std::vector<double> cands{0.0};
  for (Eigen::Index k = 0; k < w.size(); ++k)
    for (Eigen::Index l = k; l < w.size(); ++l)
      if (w(k) * w(l) > 0) cands.push_back(w(k) * w(l));
  std::sort(cands.begin(), cands.end());
  cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
  std::size_t arg = 0;
  double best = split_burg_norm(w, 0.0);
  for (std::size_t i = 1; i < cands.size(); ++i) {
    const double v = split_burg_norm(w, cands[i]);
    if (v < best) {
      best = v;
      arg = i;
    }
  }
  double a = cands[arg > 0 ? arg - 1 : 0];
  double b = cands[std::min(arg + 1, cands.size() - 1)];
  double best_alpha = cands[arg];
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = split_burg_norm(w, c), fd = split_burg_norm(w, d);
  for (int it = 0; it < 200 && b - a > 1e-12 * std::max(1.0, b); ++it) {
    if (fc < fd) {
      b = d, d = c, fd = fc;
      c = b - inv_phi * (b - a);
      fc = split_burg_norm(w, c);
    } else {
      a = c, c = d, fc = fd;
      d = a + inv_phi * (b - a);
      fd = split_burg_norm(w, d);
    }
  }
  const double mid = 0.5 * (a + b);
  if (split_burg_norm(w, mid) < best) best_alpha = mid;
  return best_alpha;
}

DoubleFactorization finalize_shifts(DoubleFactorization fact,
                                    double delta_alpha,
                                    AlphaEncoding encoding) {
  if (encoding == AlphaEncoding::burg)
    for (Leaf& leaf : fact.leaves)
      if (!leaf.full_rank()) leaf.alpha = burg_optimal_alpha(leaf.factor);
  fact = apply_alpha_threshold(std::move(fact), delta_alpha);
  for (Leaf& leaf : fact.leaves) {
    if (!leaf.shifted() || leaf.full_rank()) continue;
    ShiftedFactorPair pair = split_shifted_factor(leaf.factor, leaf.alpha);
    truncate_factor(pair.p, fact.thresholds.delta_df, fact.truncation);
    truncate_factor(pair.q, fact.thresholds.delta_df, fact.truncation);
    leaf.p = std::move(pair.p);
    leaf.q = std::move(pair.q);
    leaf.theta = static_cast<int>((leaf.q.array() != 0.0).count());
  }
  return fact;
}

ShiftCorrection shift_correction(const DoubleFactorization& fact,
                                 int n_electrons) {
  const double alpha = fact.alpha_total();
  ShiftCorrection out;
  out.a1 = fact.a1_prime - fact.n_orbitals * alpha;
  out.a2 = 0.5 * alpha;
  out.n_electrons = n_electrons;
  return out;
}

double correction_energy(const ShiftCorrection& corr) {
  const double ne = corr.n_electrons;
  return corr.a1 * ne + corr.a2 * ne * ne;
}

}  // namespace hamfactor
