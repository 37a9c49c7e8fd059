// Copyright 2026 The hamfactor Authors
// SPDX-License-Identifier: Apache-2.0

#include "hamfactor/dfopt.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>

#include "hamfactor/errors.hpp"
#include "hamfactor/lbfgs.hpp"
#include "hamfactor/norms.hpp"
#include "hamfactor/shift.hpp"
#include "hamfactor/xdf.hpp"
#include "json.hpp"
#include "linalg.hpp"

namespace hamfactor {

std::string to_string(InitMode m) {
  switch (m) {
    case InitMode::from_xdf: return "from_xdf";
    case InitMode::from_xdf_shift: return "from_xdf_shift";
    case InitMode::random: return "random";
    case InitMode::automatic: return "auto";
  }
  return "?";
}

InitMode init_mode_from_string(const std::string& s) {
  if (s == "from_xdf") return InitMode::from_xdf;
  if (s == "from_xdf_shift") return InitMode::from_xdf_shift;
  if (s == "random") return InitMode::random;
  if (s == "auto") return InitMode::automatic;
  throw ValidationError("unknown init mode '" + s + "'");
}

void write_trace_jsonl(std::ostream& os, std::span<const TraceRecord> trace) {
  for (const TraceRecord& r : trace) {
    nlohmann::json j = {{"start", r.start},
                        {"outer", r.outer},
                        {"cost", r.cost},
                        {"residual", r.residual},
                        {"penalty", r.penalty},
                        {"lambda", r.lambda},
                        {"grad_norm_w", r.grad_norm_w},
                        {"grad_norm_x", r.grad_norm_x},
                        {"n_alpha", r.n_alpha},
                        {"accepted", r.accepted}};
    os << j.dump() << '\n';
  }
}

namespace {

using detail::leaf_vector;
using detail::outer_columns;
using detail::sign_of;

int sign_at(std::span<const int> signs, std::size_t t) {
  return signs.empty() ? 1 : signs[t];
}

void check_sizes(std::size_t n_u, std::size_t n_other,
                 std::span<const int> signs) {
  if (n_u != n_other) throw ValidationError("leaf lists differ in length");
  if (!signs.empty() && signs.size() != n_u)
    throw ValidationError("sign list has the wrong length");
}

/// Columns a_t = vec(U^t diag(W^t) U^t^T).
Matrix leaf_matrix(std::span<const Matrix> u, std::span<const Vector> w,
                   int n) {
  Matrix a(static_cast<Eigen::Index>(n) * n,
           static_cast<Eigen::Index>(u.size()));
  for (std::size_t t = 0; t < u.size(); ++t) a.col(t) = leaf_vector(u[t], w[t]);
  return a;
}

Matrix residual_rank_one(const TwoElectronTensor& g, const Matrix& a,
                         std::span<const int> signs) {
  Matrix delta = g.matrix();
  Vector s(a.cols());
  for (Eigen::Index t = 0; t < a.cols(); ++t) s(t) = sign_at(signs, t);
  delta.noalias() -= a * s.asDiagonal() * a.transpose();
  return delta;
}

double penalty_value(const Vector& w, double alpha) {
  return ((w * w.transpose()).array() - alpha).abs().sum();
}

Vector penalty_gradient(const Vector& w, double alpha) {
  const Eigen::Index n = w.size();
  Vector out = Vector::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index l = 0; l < n; ++l)
      out(k) += 2.0 * sign_of(w(k) * w(l) - alpha) * w(l);
  return out;
}

/// Upper-right block of exp([[A, E], [0, A]]): the Frechet derivative
/// of the exponential at A in direction E.
Matrix exp_frechet(const Matrix& a, const Matrix& e) {
  const Eigen::Index n = a.rows();
  Matrix block = Matrix::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = a;
  block.bottomRightCorner(n, n) = a;
  block.topRightCorner(n, n) = e;
  const Matrix ex = block.exp();
  return ex.topRightCorner(n, n);
}

Matrix x_gradient(const Matrix& u0, const Matrix& x, const Matrix& grad_u) {
  const Matrix m = exp_frechet(x.transpose(), u0.transpose() * grad_u);
  return m - m.transpose();
}

int n_generator_params(int n) { return n * (n - 1) / 2; }

void pack_upper(const Matrix& m, double* out) {
  const Eigen::Index n = m.rows();
  for (Eigen::Index j = 1; j < n; ++j)
    for (Eigen::Index i = 0; i < j; ++i) *out++ = m(i, j);
}

Matrix unpack_antisymmetric(const double* in, int n) {
  Matrix x = Matrix::Zero(n, n);
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i) {
      x(i, j) = *in;
      x(j, i) = -*in;
      ++in;
    }
  return x;
}

/// Householder re-orthonormalization that keeps the columns' orientation.
Matrix reorthonormalize(const Matrix& u) {
  Eigen::HouseholderQR<Matrix> qr(u);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < q.cols(); ++k)
    if (r(k, k) < 0) q.col(k) = -q.col(k);
  return q;
}

Matrix random_rotation(int n, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, scale);
  Matrix x = Matrix::Zero(n, n);
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i) {
      x(i, j) = normal(rng);
      x(j, i) = -x(i, j);
    }
  return reorthonormalize(rotation_from_generator(x));
}

void require_finite(double v, const std::string& where, int iteration) {
  if (!std::isfinite(v))
    throw NumericalError("non-finite cost in " + where + " at iteration " +
                         std::to_string(iteration));
}

}  // namespace

// Public cost functions ------------------------------------------------------

double cost_cdf(std::span<const Matrix> u, std::span<const Matrix> v,
                const TwoElectronTensor& g, std::span<const int> signs) {
  check_sizes(u.size(), v.size(), signs);
  Matrix delta = g.matrix();
  for (std::size_t t = 0; t < u.size(); ++t) {
    const Matrix c = outer_columns(u[t]);
    delta.noalias() -= sign_at(signs, t) * (c * v[t] * c.transpose());
  }
  return 0.5 * delta.squaredNorm();
}

double cost_scdf(std::span<const Matrix> u, std::span<const Vector> w,
                 std::span<const double> alpha, const TwoElectronTensor& g,
                 double rho, std::span<const int> signs) {
  check_sizes(u.size(), w.size(), signs);
  const Matrix a = leaf_matrix(u, w, g.n_orbitals());
  double cost = 0.5 * residual_rank_one(g, a, signs).squaredNorm();
  if (rho != 0.0)
    for (std::size_t t = 0; t < w.size(); ++t)
      cost += rho * penalty_value(w[t], alpha.empty() ? 0.0 : alpha[t]);
  return cost;
}

std::vector<Vector> grad_scdf_w(std::span<const Matrix> u,
                                std::span<const Vector> w,
                                std::span<const double> alpha,
                                const TwoElectronTensor& g, double rho,
                                std::span<const int> signs) {
  check_sizes(u.size(), w.size(), signs);
  const int n = g.n_orbitals();
  const Matrix a = leaf_matrix(u, w, n);
  const Matrix b = residual_rank_one(g, a, signs) * a;
  std::vector<Vector> out;
  out.reserve(u.size());
  for (std::size_t t = 0; t < u.size(); ++t) {
    const Eigen::Map<const Matrix> bt(b.col(t).data(), n, n);
    Vector gw = -2.0 * sign_at(signs, t) *
                (u[t].transpose() * bt * u[t]).diagonal();
    if (rho != 0.0)
      gw += rho * penalty_gradient(w[t], alpha.empty() ? 0.0 : alpha[t]);
    out.push_back(std::move(gw));
  }
  return out;
}

std::vector<Matrix> grad_scdf_u(std::span<const Matrix> u,
                                std::span<const Vector> w,
                                const TwoElectronTensor& g,
                                std::span<const int> signs) {
  check_sizes(u.size(), w.size(), signs);
  const int n = g.n_orbitals();
  const Matrix a = leaf_matrix(u, w, n);
  const Matrix b = residual_rank_one(g, a, signs) * a;
  std::vector<Matrix> out;
  out.reserve(u.size());
  for (std::size_t t = 0; t < u.size(); ++t) {
    const Eigen::Map<const Matrix> bt(b.col(t).data(), n, n);
    out.push_back(-4.0 * sign_at(signs, t) * (bt * u[t] * w[t].asDiagonal()));
  }
  return out;
}

Matrix rotation_from_generator(const Matrix& x) { return x.exp(); }

std::vector<Matrix> grad_scdf_x(std::span<const Matrix> u0,
                                std::span<const Matrix> x,
                                std::span<const Vector> w,
                                const TwoElectronTensor& g,
                                std::span<const int> signs) {
  check_sizes(u0.size(), x.size(), signs);
  std::vector<Matrix> u;
  u.reserve(u0.size());
  for (std::size_t t = 0; t < u0.size(); ++t)
    u.push_back(u0[t] * rotation_from_generator(x[t]));
  const std::vector<Matrix> gu = grad_scdf_u(u, w, g, signs);
  std::vector<Matrix> out;
  out.reserve(u.size());
  for (std::size_t t = 0; t < u.size(); ++t)
    out.push_back(x_gradient(u0[t], x[t], gu[t]));
  return out;
}

std::vector<Matrix> grad_cdf_u(std::span<const Matrix> u,
                               std::span<const Matrix> v,
                               const TwoElectronTensor& g,
                               std::span<const int> signs) {
  check_sizes(u.size(), v.size(), signs);
  const int n = g.n_orbitals();
  std::vector<Matrix> cs;
  cs.reserve(u.size());
  Matrix delta = g.matrix();
  for (std::size_t t = 0; t < u.size(); ++t) {
    cs.push_back(outer_columns(u[t]));
    delta.noalias() -= sign_at(signs, t) * (cs[t] * v[t] * cs[t].transpose());
  }
  std::vector<Matrix> out;
  out.reserve(u.size());
  for (std::size_t t = 0; t < u.size(); ++t) {
    const Matrix m = delta * (cs[t] * v[t]);
    Matrix gu(n, n);
    for (int k = 0; k < n; ++k) {
      const Eigen::Map<const Matrix> mk(m.col(k).data(), n, n);
      gu.col(k) = -4.0 * sign_at(signs, t) * (mk * u[t].col(k));
    }
    out.push_back(std::move(gu));
  }
  return out;
}

// V-step -------------------------------------------------------------------

namespace {

struct VSystem {
  std::vector<Matrix> c;                  // C^t, N^2 x N
  std::vector<std::vector<Matrix>> s;     // S^{ts}
  std::vector<Matrix> rhs;                // C^t^T g C^t
  std::vector<int> signs;

  std::vector<Matrix> apply(const std::vector<Matrix>& v, double ridge) const {
    const std::size_t n = v.size();
    std::vector<Matrix> out(n);
    for (std::size_t t = 0; t < n; ++t) {
      out[t] = 2.0 * ridge * v[t];
      for (std::size_t u = 0; u < n; ++u)
        out[t].noalias() +=
            (signs[t] * signs[u]) * (s[t][u] * v[u] * s[t][u].transpose());
    }
    return out;
  }
};

VSystem build_v_system(std::span<const Matrix> u, const TwoElectronTensor& g,
                       std::span<const int> signs) {
  VSystem sys;
  const std::size_t n_leaves = u.size();
  sys.signs.resize(n_leaves);
  for (std::size_t t = 0; t < n_leaves; ++t) {
    sys.c.push_back(outer_columns(u[t]));
    sys.signs[t] = sign_at(signs, t);
  }
  sys.s.assign(n_leaves, std::vector<Matrix>(n_leaves));
  for (std::size_t t = 0; t < n_leaves; ++t)
    for (std::size_t r = 0; r < n_leaves; ++r)
      sys.s[t][r] = (u[t].transpose() * u[r]).array().square().matrix();
  for (std::size_t t = 0; t < n_leaves; ++t)
    sys.rhs.push_back(sys.signs[t] *
                      (sys.c[t].transpose() * (g.matrix() * sys.c[t])));
  return sys;
}

double inner(const std::vector<Matrix>& a, const std::vector<Matrix>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i].array() * b[i].array()).sum();
  return s;
}

std::vector<Matrix> conjugate_gradient(const VSystem& sys, double ridge,
                                       std::vector<Matrix> x) {
  const std::size_t n = sys.rhs.size();
  std::vector<Matrix> ax = sys.apply(x, ridge);
  std::vector<Matrix> r(n), p(n);
  for (std::size_t t = 0; t < n; ++t) r[t] = sys.rhs[t] - ax[t];
  p = r;
  double rr = inner(r, r);
  const double bb = std::max(inner(sys.rhs, sys.rhs), 1e-300);
  const int dim = static_cast<int>(n * sys.rhs.front().size());
  const int max_iter = std::max(50, 10 * dim);
  for (int it = 0; it < max_iter && rr > 1e-30 * bb; ++it) {
    const std::vector<Matrix> ap = sys.apply(p, ridge);
    const double pap = inner(p, ap);
    if (!(pap > 0)) break;
    const double step = rr / pap;
    for (std::size_t t = 0; t < n; ++t) {
      x[t] += step * p[t];
      r[t] -= step * ap[t];
    }
    const double rr_new = inner(r, r);
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t t = 0; t < n; ++t) p[t] = r[t] + beta * p[t];
  }
  for (Matrix& m : x) m = 0.5 * (m + m.transpose()).eval();
  return x;
}

}  // namespace

std::vector<Matrix> solve_v_step(std::span<const Matrix> u,
                                 const TwoElectronTensor& g, double ridge_rho,
                                 std::span<const Matrix> v0) {
  if (u.empty()) return {};
  const int n = g.n_orbitals();
  const VSystem sys = build_v_system(u, g, {});
  std::vector<Matrix> x(u.size(), Matrix::Zero(n, n));
  if (v0.size() == u.size())
    for (std::size_t t = 0; t < u.size(); ++t) x[t] = v0[t];
  return conjugate_gradient(sys, ridge_rho, std::move(x));
}

// Optimizer state ----------------------------------------------------------

namespace {

struct State {
  std::vector<Matrix> u;
  std::vector<Vector> w;
  std::vector<Matrix> v;  // full cores (CDF/RCDF only)
  std::vector<double> alpha;
  std::vector<int> sign;

  std::size_t size() const { return u.size(); }
};

std::vector<Leaf> xdf_leaves(const TwoElectronTensor& g, int n_df,
                             bool keep_signed) {
  const int n = g.n_orbitals();
  const int n_first = std::min(n_df, n * n);
  return factorize_xdf(g, n_first, 0.0, TruncationMode::component,
                       keep_signed)
      .leaves;
}

double rms_factor(const std::vector<Vector>& w, int n) {
  double s = 0.0;
  std::size_t count = 0;
  for (const Vector& v : w) {
    s += v.squaredNorm();
    count += v.size();
  }
  return count ? std::sqrt(s / count) : 1.0 / std::max(n, 1);
}

State initial_state(const TwoElectronTensor& g, int n_df, InitMode mode,
                    std::mt19937_64& rng) {
  const int n = g.n_orbitals();
  State st;
  double shift_leaf = 0.0;
  std::vector<Leaf> leaves;
  if (mode == InitMode::from_xdf_shift) {
    const int budget = std::max(n_df - 1, 1);
    GlobalShiftResult gs = global_two_body_shift(
        g, std::min(budget, n * n), 0.0, ShiftObjective::burg);
    leaves = std::move(gs.fact.leaves);
    shift_leaf = gs.a2_prime;
  } else {
    leaves = xdf_leaves(g, n_df, false);
  }
  for (Leaf& l : leaves) {
    if (static_cast<int>(st.size()) >= n_df) break;
    st.u.push_back(std::move(l.rotation));
    st.w.push_back(std::move(l.factor));
    st.sign.push_back(l.sign);
  }
  int shift_index = -1;
  if (shift_leaf != 0.0 && static_cast<int>(st.size()) < n_df) {
    shift_index = static_cast<int>(st.size());
    st.u.push_back(Matrix::Identity(n, n));
    st.w.push_back(Vector::Constant(n, std::sqrt(std::abs(shift_leaf))));
    st.sign.push_back(shift_leaf > 0 ? 1 : -1);
  }

  const double scale = rms_factor(st.w, n);
  std::normal_distribution<double> normal(0.0, 1.0);
  if (mode == InitMode::random) {
    for (std::size_t t = 0; t < st.size(); ++t) {
      st.u[t] = random_rotation(n, 1.0, rng);
      for (Eigen::Index k = 0; k < n; ++k) st.w[t](k) = scale * normal(rng);
      st.sign[t] = 1;
    }
  }
  while (static_cast<int>(st.size()) < n_df) {
    st.u.push_back(random_rotation(n, 1.0, rng));
    Vector w(n);
    for (int k = 0; k < n; ++k) w(k) = 1e-3 * scale * normal(rng);
    st.w.push_back(std::move(w));
    st.sign.push_back(1);
  }
  st.alpha.assign(st.size(), 0.0);
  // The shift leaf is exactly |a2'| 1 (x) 1, so its split vanishes.
  if (shift_index >= 0) st.alpha[shift_index] = std::abs(shift_leaf);
  return st;
}

double penalty_total(const State& st) {
  double s = 0.0;
  for (std::size_t t = 0; t < st.size(); ++t)
    s += penalty_value(st.w[t], st.alpha[t]);
  return s;
}

DoubleFactorization to_factorization(const State& st, int n, Method method,
                                     const OptimizerConfig& cfg,
                                     const OneBodyTensors* one_body) {
  DoubleFactorization f;
  f.n_orbitals = n;
  f.method = method;
  f.thresholds = {cfg.delta_df, cfg.delta_alpha, cfg.rho};
  f.truncation = TruncationMode::component;
  f.variant = method == Method::SCDF ? "scdf"
              : method == Method::CDF ? "cdf"
                                      : "rcdf";
  if (one_body) f.a1_prime = one_body_shift(one_body->eig_values).a1_prime;
  for (std::size_t t = 0; t < st.size(); ++t) {
    Leaf leaf;
    leaf.rotation = st.u[t];
    leaf.sign = st.sign[t];
    if (!st.v.empty()) {
      leaf.core = 0.5 * (st.v[t] + st.v[t].transpose());
      Eigen::SelfAdjointEigenSolver<Matrix> eig(leaf.core);
      leaf.xi = static_cast<int>(
          (eig.eigenvalues().array().abs() >= cfg.delta_df).count());
      if (leaf.core.cwiseAbs().maxCoeff() == 0.0) continue;
    } else {
      leaf.factor = st.w[t];
      truncate_factor(leaf.factor, cfg.delta_df, f.truncation);
      leaf.xi = static_cast<int>((leaf.factor.array() != 0.0).count());
      leaf.alpha = st.alpha[t];
      if (leaf.xi == 0) continue;
    }
    f.leaves.push_back(std::move(leaf));
  }
  if (method == Method::SCDF)
    f = finalize_shifts(std::move(f), cfg.delta_alpha, cfg.alpha_encoding);
  return f;
}

double traced_lambda(const DoubleFactorization& f,
                     const OneBodyTensors* one_body) {
  const double two = two_body_norm_burg(f);
  return one_body ? two + one_body_norm(f, one_body->eig_values) : two;
}

LbfgsOptions inner_options(const OptimizerConfig& cfg) {
  LbfgsOptions o;
  o.max_iterations = cfg.max_inner_iters;
  o.memory = cfg.lbfgs_memory;
  o.tolerance = cfg.lbfgs_tolerance;
  return o;
}

/// L-BFGS over every W^t with U^t and alpha^t fixed. Returns |grad|_inf.
double w_step(State& st, const TwoElectronTensor& g, double rho,
              const LbfgsOptions& opt) {
  const int n = g.n_orbitals();
  const std::size_t nl = st.size();
  Vector x0(static_cast<Eigen::Index>(nl) * n);
  for (std::size_t t = 0; t < nl; ++t) x0.segment(t * n, n) = st.w[t];
  auto f = [&](const Vector& x, Vector& grad) {
    std::vector<Vector> w(nl);
    for (std::size_t t = 0; t < nl; ++t) w[t] = x.segment(t * n, n);
    const Matrix a = leaf_matrix(st.u, w, n);
    const Matrix delta = residual_rank_one(g, a, st.sign);
    double cost = 0.5 * delta.squaredNorm();
    const Matrix b = delta * a;
    for (std::size_t t = 0; t < nl; ++t) {
      const Eigen::Map<const Matrix> bt(b.col(t).data(), n, n);
      Vector gw = -2.0 * st.sign[t] *
                  (st.u[t].transpose() * bt * st.u[t]).diagonal();
      if (rho != 0.0) {
        cost += rho * penalty_value(w[t], st.alpha[t]);
        gw += rho * penalty_gradient(w[t], st.alpha[t]);
      }
      grad.segment(t * n, n) = gw;
    }
    return cost;
  };
  const LbfgsResult r = minimize_lbfgs(f, x0, opt);
  for (std::size_t t = 0; t < nl; ++t) st.w[t] = r.x.segment(t * n, n);
  return r.grad_norm;
}

/// Shared U-step: L-BFGS over the generators X^t with U^t = U0^t exp(X^t),
/// then U0 <- U0 exp(X). `leaf_grad` fills the raw dL/dU^t.
template <class Residual>
double u_step(State& st, int n, const LbfgsOptions& opt, Residual residual) {
  const std::size_t nl = st.size();
  const int np = n_generator_params(n);
  if (np == 0 || nl == 0) return 0.0;
  const std::vector<Matrix> u0 = st.u;
  auto f = [&](const Vector& x, Vector& grad) {
    std::vector<Matrix> xs(nl), u(nl);
    for (std::size_t t = 0; t < nl; ++t) {
      xs[t] = unpack_antisymmetric(x.data() + t * np, n);
      u[t] = u0[t] * rotation_from_generator(xs[t]);
    }
    std::vector<Matrix> gu;
    const double cost = residual(u, gu);
    for (std::size_t t = 0; t < nl; ++t)
      pack_upper(x_gradient(u0[t], xs[t], gu[t]), grad.data() + t * np);
    return cost;
  };
  const LbfgsResult r =
      minimize_lbfgs(f, Vector::Zero(static_cast<Eigen::Index>(nl) * np), opt);
  for (std::size_t t = 0; t < nl; ++t)
    st.u[t] = reorthonormalize(
        u0[t] *
        rotation_from_generator(unpack_antisymmetric(r.x.data() + t * np, n)));
  return r.grad_norm;
}

double rank_one_u_step(State& st, const TwoElectronTensor& g,
                       const LbfgsOptions& opt) {
  const int n = g.n_orbitals();
  return u_step(st, n, opt,
                [&](const std::vector<Matrix>& u, std::vector<Matrix>& gu) {
                  const Matrix a = leaf_matrix(u, st.w, n);
                  const Matrix delta = residual_rank_one(g, a, st.sign);
                  const Matrix b = delta * a;
                  gu.resize(u.size());
                  for (std::size_t t = 0; t < u.size(); ++t) {
                    const Eigen::Map<const Matrix> bt(b.col(t).data(), n, n);
                    gu[t] = -4.0 * st.sign[t] *
                            (bt * u[t] * st.w[t].asDiagonal());
                  }
                  return 0.5 * delta.squaredNorm();
                });
}

double full_rank_u_step(State& st, const TwoElectronTensor& g,
                        const LbfgsOptions& opt) {
  const int n = g.n_orbitals();
  return u_step(st, n, opt,
                [&](const std::vector<Matrix>& u, std::vector<Matrix>& gu) {
                  gu = grad_cdf_u(u, st.v, g, st.sign);
                  return cost_cdf(u, st.v, g, st.sign);
                });
}

double residual_of(const State& st, const TwoElectronTensor& g) {
  if (!st.v.empty()) return cost_cdf(st.u, st.v, g, st.sign);
  return cost_scdf(st.u, st.w, st.alpha, g, 0.0, st.sign);
}

bool plateaued(const std::vector<double>& lambdas, int window,
               double threshold) {
  const int m = static_cast<int>(lambdas.size());
  if (window < 1 || m <= window) return false;
  return std::abs(lambdas[m - 1 - window] - lambdas[m - 1]) < threshold;
}

OptimizationResult run_scdf(const TwoElectronTensor& g, int n_df,
                            const OptimizerConfig& cfg,
                            const OneBodyTensors* one_body, InitMode mode,
                            int start) {
  const int n = g.n_orbitals();
  std::mt19937_64 rng(cfg.rng_seed + static_cast<std::uint64_t>(start));
  State st = initial_state(g, n_df, mode, rng);
  const LbfgsOptions opt = inner_options(cfg);

  OptimizationResult out;
  auto record = [&](int outer, const State& s, double gw, double gx,
                    bool accepted) {
    TraceRecord r;
    r.start = start;
    r.outer = outer;
    r.residual = residual_of(s, g);
    r.penalty = cfg.rho * penalty_total(s);
    r.cost = r.residual + r.penalty;
    const DoubleFactorization f =
        to_factorization(s, n, Method::SCDF, cfg, one_body);
    r.lambda = traced_lambda(f, one_body);
    r.n_alpha = f.n_alpha();
    r.grad_norm_w = gw;
    r.grad_norm_x = gx;
    r.accepted = accepted;
    require_finite(r.cost, "SCDF", outer);
    return r;
  };

  out.trace.push_back(record(0, st, 0.0, 0.0, true));
  std::vector<double> lambdas{out.trace.back().lambda};
  out.stop_reason = "max_outer_iters";
  for (int it = 1; it <= cfg.max_outer_iters; ++it) {
    State next = st;
    const double gw = w_step(next, g, cfg.rho, opt);
    for (std::size_t t = 0; t < next.size(); ++t) {
      const Vector& w = next.w[t];
      const Matrix ww = w * w.transpose();
      const double m =
          median(std::vector<double>(ww.data(), ww.data() + ww.size()));
      next.alpha[t] = std::max(m, 0.0);
    }
    const double gx = rank_one_u_step(next, g, opt);
    TraceRecord r = record(it, next, gw, gx, true);
    if (r.lambda > lambdas.back() + 1e-9) {
      r.accepted = false;
      out.trace.push_back(r);
      out.stop_reason = "lambda_increase";
      break;
    }
    const double previous_cost = out.trace.back().cost;
    st = std::move(next);
    out.trace.push_back(r);
    lambdas.push_back(r.lambda);
    if (plateaued(lambdas, cfg.plateau_window, cfg.norm_plateau_threshold)) {
      out.stop_reason = "lambda_plateau";
      break;
    }
    if (std::abs(previous_cost - r.cost) <=
        1e-14 * std::max(std::abs(r.cost), 1e-300)) {
      out.stop_reason = "cost_converged";
      break;
    }
  }
  out.fact = to_factorization(st, n, Method::SCDF, cfg, one_body);
  out.residual = cost_scdf(
      [&] {
        std::vector<Matrix> u;
        for (const Leaf& l : out.fact.leaves) u.push_back(l.rotation);
        return u;
      }(),
      [&] {
        std::vector<Vector> w;
        for (const Leaf& l : out.fact.leaves) w.push_back(l.factor);
        return w;
      }(),
      {}, g, 0.0,
      [&] {
        std::vector<int> s;
        for (const Leaf& l : out.fact.leaves) s.push_back(l.sign);
        return s;
      }());
  return out;
}

enum class VStep { exact, ridge, lasso };

/// Sub-gradient L-BFGS V-step for the rho sum |V_kl| penalty.
void lasso_v_step(State& st, const TwoElectronTensor& g, double rho,
                  const LbfgsOptions& opt) {
  const VSystem sys = build_v_system(st.u, g, st.sign);
  const std::size_t nl = st.size();
  const int n = g.n_orbitals();
  const int block = n * n;
  const double g2 = 0.5 * g.matrix().squaredNorm();
  Vector x0(static_cast<Eigen::Index>(nl) * block);
  for (std::size_t t = 0; t < nl; ++t)
    x0.segment(t * block, block) =
        Eigen::Map<const Vector>(st.v[t].data(), block);
  auto f = [&](const Vector& x, Vector& grad) {
    std::vector<Matrix> v(nl);
    for (std::size_t t = 0; t < nl; ++t)
      v[t] = Eigen::Map<const Matrix>(x.data() + t * block, n, n);
    const std::vector<Matrix> av = sys.apply(v, 0.0);
    double cost = g2;
    for (std::size_t t = 0; t < nl; ++t) {
      cost += 0.5 * (v[t].array() * av[t].array()).sum() -
              (v[t].array() * sys.rhs[t].array()).sum() +
              rho * v[t].cwiseAbs().sum();
      Matrix gt = av[t] - sys.rhs[t];
      gt += rho * v[t].unaryExpr([](double z) { return sign_of(z); });
      grad.segment(t * block, block) = Eigen::Map<const Vector>(gt.data(), block);
    }
    return cost;
  };
  const LbfgsResult r = minimize_lbfgs(f, x0, opt);
  for (std::size_t t = 0; t < nl; ++t) {
    st.v[t] = Eigen::Map<const Matrix>(r.x.data() + t * block, n, n);
    st.v[t] = 0.5 * (st.v[t] + st.v[t].transpose()).eval();
  }
}

OptimizationResult run_cdf(const TwoElectronTensor& g, int n_df,
                           const OptimizerConfig& cfg,
                           const OneBodyTensors* one_body, VStep kind,
                           Method method, int start) {
  const int n = g.n_orbitals();
  std::mt19937_64 rng(cfg.rng_seed + static_cast<std::uint64_t>(start));
  const InitMode mode = cfg.init_mode == InitMode::random ? InitMode::random
                                                          : InitMode::from_xdf;
  State st = initial_state(g, n_df, mode, rng);
  for (std::size_t t = 0; t < st.size(); ++t) {
    st.v.push_back(st.w[t] * st.w[t].transpose());
    st.sign[t] = 1;
  }
  const LbfgsOptions opt = inner_options(cfg);
  const double ridge = kind == VStep::ridge ? cfg.rho : 0.0;

  auto penalty = [&](const State& s) {
    double p = 0.0;
    for (const Matrix& v : s.v)
      p += kind == VStep::ridge   ? cfg.rho * v.squaredNorm()
           : kind == VStep::lasso ? cfg.rho * v.cwiseAbs().sum()
                                  : 0.0;
    return p;
  };

  OptimizationResult out;
  auto record = [&](int outer, double gx) {
    TraceRecord r;
    r.start = start;
    r.outer = outer;
    r.residual = residual_of(st, g);
    r.penalty = penalty(st);
    r.cost = r.residual + r.penalty;
    r.lambda = traced_lambda(to_factorization(st, n, method, cfg, one_body),
                             one_body);
    r.grad_norm_x = gx;
    require_finite(r.cost, to_string(method), outer);
    return r;
  };
  out.trace.push_back(record(0, 0.0));
  std::vector<double> lambdas{out.trace.back().lambda};
  out.stop_reason = "max_outer_iters";
  for (int it = 1; it <= cfg.max_outer_iters; ++it) {
    if (kind == VStep::lasso) {
      lasso_v_step(st, g, cfg.rho, opt);
    } else {
      const VSystem sys = build_v_system(st.u, g, st.sign);
      st.v = conjugate_gradient(sys, ridge, st.v);
    }
    const double gx = full_rank_u_step(st, g, opt);
    const double previous_cost = out.trace.back().cost;
    out.trace.push_back(record(it, gx));
    lambdas.push_back(out.trace.back().lambda);
    if (plateaued(lambdas, cfg.plateau_window, cfg.norm_plateau_threshold)) {
      out.stop_reason = "lambda_plateau";
      break;
    }
    if (std::abs(previous_cost - out.trace.back().cost) <=
        1e-12 * std::max(std::abs(previous_cost), 1e-300)) {
      out.stop_reason = "cost_converged";
      break;
    }
  }
  out.fact = to_factorization(st, n, method, cfg, one_body);
  out.residual = residual_of(st, g);
  return out;
}

void validate(const TwoElectronTensor& g, int n_df,
              const OptimizerConfig& cfg) {
  if (n_df < 1) throw ValidationError("n_df must be >= 1");
  if (g.n_orbitals() < 1) throw ValidationError("empty tensor");
  if (cfg.rho < 0) throw ValidationError("rho must be >= 0");
  if (cfg.gamma != 1 && cfg.gamma != 2)
    throw ValidationError("gamma must be 1 or 2");
  if (cfg.n_starts < 1) throw ValidationError("n_starts must be >= 1");
}

template <class Run>
OptimizationResult best_of(int n_runs, Run run) {
  OptimizationResult best;
  double best_lambda = std::numeric_limits<double>::infinity();
  std::vector<TraceRecord> all;
  for (int s = 0; s < n_runs; ++s) {
    OptimizationResult r = run(s);
    all.insert(all.end(), r.trace.begin(), r.trace.end());
    double lambda = best_lambda;
    for (auto it = r.trace.rbegin(); it != r.trace.rend(); ++it)
      if (it->accepted) {
        lambda = it->lambda;
        break;
      }
    if (s == 0 || lambda < best_lambda) {
      best_lambda = lambda;
      best = std::move(r);
    }
  }
  best.trace = std::move(all);
  return best;
}

}  // namespace

OptimizationResult optimize_scdf(const TwoElectronTensor& g, int n_df,
                                 const OptimizerConfig& config,
                                 const OneBodyTensors* one_body) {
  validate(g, n_df, config);
  if (config.init_mode != InitMode::automatic)
    return best_of(config.n_starts, [&](int s) {
      return run_scdf(g, n_df, config, one_body, config.init_mode, s);
    });
  // Runs 2i and 2i+1 share rng seed offset i.
  return best_of(2 * config.n_starts, [&](int s) {
    OptimizationResult r =
        run_scdf(g, n_df, config, one_body,
                 s % 2 == 0 ? InitMode::from_xdf : InitMode::from_xdf_shift,
                 s / 2);
    for (TraceRecord& t : r.trace) t.start = s;
    return r;
  });
}

OptimizationResult optimize_cdf(const TwoElectronTensor& g, int n_df,
                                const OptimizerConfig& config,
                                const OneBodyTensors* one_body) {
  validate(g, n_df, config);
  return best_of(config.n_starts, [&](int s) {
    return run_cdf(g, n_df, config, one_body, VStep::exact, Method::CDF, s);
  });
}

OptimizationResult optimize_rcdf(const TwoElectronTensor& g, int n_df,
                                 const OptimizerConfig& config,
                                 const OneBodyTensors* one_body) {
  validate(g, n_df, config);
  const VStep kind = config.rho == 0.0   ? VStep::exact
                     : config.gamma == 2 ? VStep::ridge
                                         : VStep::lasso;
  return best_of(config.n_starts, [&](int s) {
    return run_cdf(g, n_df, config, one_body, kind, Method::RCDF, s);
  });
}

}  // namespace hamfactor
