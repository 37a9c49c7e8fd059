// Copyright 2026 The hamfactor Authors
// SPDX-License-Identifier: Apache-2.0

#include "hamfactor/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "hamfactor/errors.hpp"

namespace hamfactor {

TwoElectronTensor::TwoElectronTensor(int n_orbitals) : n_(n_orbitals) {
  if (n_orbitals < 0) throw ValidationError("negative orbital count");
  const std::size_t n = static_cast<std::size_t>(n_orbitals);
  data_.assign(n * n * n * n, 0.0);
}

void TwoElectronTensor::set_symmetric(int p, int q, int r, int s,
                                      double value) {
  (*this)(p, q, r, s) = value;
  (*this)(q, p, r, s) = value;
  (*this)(p, q, s, r) = value;
  (*this)(q, p, s, r) = value;
  (*this)(r, s, p, q) = value;
  (*this)(s, r, p, q) = value;
  (*this)(r, s, q, p) = value;
  (*this)(s, r, q, p) = value;
}

double TwoElectronTensor::max_symmetry_violation() const {
  double worst = 0.0;
  for (int p = 0; p < n_; ++p)
    for (int q = 0; q < n_; ++q)
      for (int r = 0; r < n_; ++r)
        for (int s = 0; s < n_; ++s) {
          const double v = (*this)(p, q, r, s);
          worst = std::max({worst, std::abs(v - (*this)(q, p, r, s)),
                            std::abs(v - (*this)(p, q, s, r)),
                            std::abs(v - (*this)(r, s, p, q))});
        }
  return worst;
}

double TwoElectronTensor::frobenius_norm() const {
  return matrix().norm();
}

TwoElectronTensor& TwoElectronTensor::operator+=(
    const TwoElectronTensor& other) {
  if (other.n_ != n_) throw ValidationError("tensor size mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

TwoElectronTensor& TwoElectronTensor::operator-=(
    const TwoElectronTensor& other) {
  if (other.n_ != n_) throw ValidationError("tensor size mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

double frobenius_distance(const TwoElectronTensor& a,
                          const TwoElectronTensor& b) {
  if (a.n_orbitals() != b.n_orbitals())
    throw ValidationError("tensor size mismatch");
  return (a.matrix() - b.matrix()).norm();
}

TwoElectronTensor subtract_number_squared(const TwoElectronTensor& g,
                                          double shift) {
  TwoElectronTensor out = g;
  const int n = g.n_orbitals();
  for (int p = 0; p < n; ++p)
    for (int r = 0; r < n; ++r) out(p, p, r, r) -= shift;
  return out;
}

OneBodyTensors derive_one_body(const Matrix& h, const TwoElectronTensor& g,
                               double e_nuc) {
  const int n = g.n_orbitals();
  if (h.rows() != n || h.cols() != n)
    throw ValidationError("one-body matrix does not match orbital count");
  if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw ValidationError("one-body matrix h is not symmetric");

  OneBodyTensors out;
  out.h = 0.5 * (h + h.transpose());
  out.e_nuc = e_nuc;
  out.k = out.h;
  out.f.resize(n, n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) {
      double exchange = 0.0;
      double coulomb = 0.0;
      for (int r = 0; r < n; ++r) {
        exchange += g(p, r, r, q);
        coulomb += g(p, q, r, r);
      }
      out.k(p, q) -= 0.5 * exchange;
      out.f(q, p) = coulomb;
    }
  out.k = (0.5 * (out.k + out.k.transpose())).eval();
  out.f = (out.k + 0.5 * (out.f + out.f.transpose())).eval();

  Eigen::SelfAdjointEigenSolver<Matrix> eig(out.f);
  out.eig_values = eig.eigenvalues();
  out.eig_vectors = eig.eigenvectors();

  double diag_sum = 0.0;
  for (int p = 0; p < n; ++p)
    for (int r = 0; r < n; ++r) diag_sum += g(p, p, r, r);
  out.constant_term = e_nuc + out.f.trace() - 0.5 * diag_sum;
  return out;
}

TwoElectronTensor tensor_from_factors(std::span<const Matrix> factors) {
  if (factors.empty()) throw ValidationError("no factors given");
  const int n = static_cast<int>(factors.front().rows());
  TwoElectronTensor g(n);
  auto m = g.matrix();
  for (const Matrix& l : factors) {
    if (l.rows() != n || l.cols() != n)
      throw ValidationError("factor has wrong shape");
    const Matrix sym = 0.5 * (l + l.transpose());
    const Eigen::Map<const Vector> v(sym.data(), n * n);
    m.noalias() += v * v.transpose();
  }
  // Exact symmetry of the stored buffer (rounding in the rank-one updates
  // is symmetric already, this just pins M = M^T bitwise).
  m = 0.5 * (Matrix(m) + Matrix(m).transpose());
  return g;
}

SyntheticInstance synthesize_instance(const SyntheticSpec& spec) {
  if (spec.n_orbitals < 1) throw ValidationError("n_orbitals must be >= 1");
  if (spec.n_components < 1)
    throw ValidationError("n_components must be >= 1");
  std::mt19937_64 rng(spec.rng_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = spec.n_orbitals;

  SyntheticInstance out;
  out.factors.reserve(spec.n_components);
  for (int c = 0; c < spec.n_components; ++c) {
    Matrix l(n, n);
    for (int p = 0; p < n; ++p)
      for (int q = 0; q <= p; ++q) {
        const double x = normal(rng) / std::sqrt(static_cast<double>(n));
        l(p, q) = x;
        l(q, p) = x;
      }
    if (c == 0) l += spec.identity_bias * Matrix::Identity(n, n);
    out.factors.push_back(std::move(l));
  }
  out.g = tensor_from_factors(out.factors);
  return out;
}

std::string to_string(Method m) {
  switch (m) {
    case Method::XDF: return "XDF";
    case Method::CDF: return "CDF";
    case Method::RCDF: return "RCDF";
    case Method::SCDF: return "SCDF";
  }
  return "?";
}

Method method_from_string(const std::string& s) {
  std::string u = s;
  std::transform(u.begin(), u.end(), u.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  if (u == "XDF") return Method::XDF;
  if (u == "CDF") return Method::CDF;
  if (u == "RCDF") return Method::RCDF;
  if (u == "SCDF") return Method::SCDF;
  throw ValidationError("unknown method '" + s + "'");
}

int DoubleFactorization::n_alpha() const {
  return static_cast<int>(std::count_if(
      leaves.begin(), leaves.end(), [](const Leaf& l) { return l.shifted(); }));
}

double DoubleFactorization::alpha_total() const {
  double a = a2_prime;
  for (const Leaf& l : leaves) a += l.sign * l.alpha;
  return a;
}

std::vector<int> DoubleFactorization::leaf_ranks() const {
  std::vector<int> out;
  out.reserve(leaves.size());
  for (const Leaf& l : leaves) out.push_back(l.xi);
  return out;
}

double DoubleFactorization::mean_xi() const {
  if (leaves.empty()) return 0.0;
  const auto ranks = leaf_ranks();
  return std::accumulate(ranks.begin(), ranks.end(), 0.0) /
         static_cast<double>(ranks.size());
}

bool DoubleFactorization::full_rank() const {
  return std::any_of(leaves.begin(), leaves.end(),
                     [](const Leaf& l) { return l.full_rank(); });
}

}  // namespace hamfactor
